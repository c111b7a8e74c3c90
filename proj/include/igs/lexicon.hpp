#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

namespace igs {

// Token -> mean valence (roughly [-4, +4]).
//
// File format: UTF-8, one "token<TAB>valence" entry per line; further
// tab-separated columns are ignored. Lines starting with '#' are comments,
// and "# source: ..." / "# version: ..." comments fill in provenance.
class ValenceLexicon {
 public:
  ValenceLexicon() = default;

  static ValenceLexicon load(const std::filesystem::path& path);
  static ValenceLexicon parse(std::string_view contents);

  // Case-insensitive lookup; unknown tokens have zero valence.
  double valence(std::string_view token) const;
  bool contains(std::string_view token) const;

  // Lookups with an already-lowercased token (hot path for the analyzer).
  const double* find_lowered(const std::string& lowered) const;

  void insert(std::string token, double valence) { entries_[std::move(token)] = valence; }
  std::size_t size() const { return entries_.size(); }

  const std::string& source() const { return source_; }
  const std::string& version() const { return version_; }
  // SHA-256 of the file bytes the lexicon was parsed from.
  const std::string& checksum() const { return checksum_; }

 private:
  std::unordered_map<std::string, double> entries_;
  std::string source_;
  std::string version_;
  std::string checksum_;
};

// Single code point emoji -> textual description. Comment lines start with
// "# " (a bare '#' begins some keycap entries).
class EmojiLexicon {
 public:
  static EmojiLexicon load(const std::filesystem::path& path);
  static EmojiLexicon parse(std::string_view contents);

  const std::u32string* find(char32_t cp) const;
  std::size_t size() const { return entries_.size(); }
  const std::string& checksum() const { return checksum_; }

 private:
  std::unordered_map<char32_t, std::u32string> entries_;
  std::string checksum_;
};

}  // namespace igs
