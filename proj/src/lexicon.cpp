#include "igs/lexicon.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "igs/error.hpp"
#include "igs/hashing.hpp"
#include "unicode.hpp"

namespace igs {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LexiconError("cannot open lexicon " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <typename Fn>
void for_each_line(std::string_view contents, Fn&& fn) {
  std::size_t line_no = 0;
  while (!contents.empty()) {
    const auto nl = contents.find('\n');
    std::string_view line = contents.substr(0, nl);
    contents = nl == std::string_view::npos ? std::string_view{} : contents.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) fn(line, line_no);
  }
}

std::string_view trim_comment_value(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::string lower_utf8(std::string_view token) {
  bool ascii = true;
  for (char c : token) ascii = ascii && static_cast<unsigned char>(c) < 0x80;
  if (ascii) {
    std::string out(token);
    for (char& c : out) {
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
  }
  return unicode::encode_utf8(unicode::to_lower(unicode::decode_utf8(token)));
}

}  // namespace

ValenceLexicon ValenceLexicon::load(const std::filesystem::path& path) {
  return parse(read_file(path));
}

ValenceLexicon ValenceLexicon::parse(std::string_view contents) {
  ValenceLexicon lex;
  lex.checksum_ = sha256_hex(contents);
  for_each_line(contents, [&](std::string_view line, std::size_t line_no) {
    if (line.front() == '#') {
      auto body = trim_comment_value(line.substr(1));
      if (body.starts_with("source:")) lex.source_ = trim_comment_value(body.substr(7));
      if (body.starts_with("version:")) lex.version_ = trim_comment_value(body.substr(8));
      return;
    }
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0) {
      throw LexiconError("lexicon line " + std::to_string(line_no) + ": expected token<TAB>valence");
    }
    auto value = line.substr(tab + 1);
    value = value.substr(0, value.find('\t'));
    value = trim_comment_value(value);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
      throw LexiconError("lexicon line " + std::to_string(line_no) + ": bad valence '" +
                         std::string(value) + "'");
    }
    lex.entries_[std::string(line.substr(0, tab))] = v;
  });
  return lex;
}

const double* ValenceLexicon::find_lowered(const std::string& lowered) const {
  const auto it = entries_.find(lowered);
  return it == entries_.end() ? nullptr : &it->second;
}

double ValenceLexicon::valence(std::string_view token) const {
  const double* v = find_lowered(lower_utf8(token));
  return v ? *v : 0.0;
}

bool ValenceLexicon::contains(std::string_view token) const {
  return find_lowered(lower_utf8(token)) != nullptr;
}

EmojiLexicon EmojiLexicon::load(const std::filesystem::path& path) {
  return parse(read_file(path));
}

EmojiLexicon EmojiLexicon::parse(std::string_view contents) {
  EmojiLexicon lex;
  lex.checksum_ = sha256_hex(contents);
  for_each_line(contents, [&](std::string_view line, std::size_t) {
    if (line == "#" || line.starts_with("# ")) return;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) return;
    const auto key = unicode::decode_utf8(line.substr(0, tab));
    // Only single code point keys can ever match during per-character replacement.
    if (key.size() != 1) return;
    auto desc = line.substr(tab + 1);
    desc = desc.substr(0, desc.find('\t'));
    lex.entries_[key[0]] = unicode::decode_utf8(desc);
  });
  return lex;
}

const std::u32string* EmojiLexicon::find(char32_t cp) const {
  const auto it = entries_.find(cp);
  return it == entries_.end() ? nullptr : &it->second;
}

}  // namespace igs
