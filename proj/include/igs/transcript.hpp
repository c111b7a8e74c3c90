#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

namespace igs {

// One prompt/response exchange, stored verbatim.
struct TranscriptRecord {
  std::string run_id;
  std::string backend_id;
  std::string attribute;
  std::string from_code;
  std::string to_code;
  std::string template_id;
  int repeat_index = 1;
  std::string system_text;
  std::string user_text;
  std::string response_text;
  std::string request_key;
  std::string timestamp;  // UTC, ISO 8601

  friend bool operator==(const TranscriptRecord&, const TranscriptRecord&) = default;
};

// Content hash identifying one exchange slot. SHA-256 (lowercase hex) over
//
//   "igs.request_key.v1"
//   for each of backend_id, system_text, user_text, decimal repeat_index:
//     "\n" <byte length in decimal> ":" <UTF-8 bytes>
//
// Identical prompts in the same repeat slot share a key.
std::string request_key(std::string_view backend_id, std::string_view system_text,
                        std::string_view user_text, int repeat_index);

// Field order follows the record definition.
nlohmann::ordered_json to_json(const TranscriptRecord& record);
// Throws SchemaError on missing or mistyped fields.
TranscriptRecord record_from_json(const nlohmann::json& j);
std::string to_jsonl_line(const TranscriptRecord& record);

std::string utc_timestamp_now();

// Append-only JSONL transcript, indexed by request_key. The first record for
// a key wins; later appends with a known key are ignored, so existing lines
// are never rewritten. Appends are serialized internally and flushed per
// line. Safe for concurrent callers.
class TranscriptStore {
 public:
  // In-memory store (no file).
  TranscriptStore() = default;

  // Opens (creating if needed) a JSONL file, loading any existing records.
  static std::unique_ptr<TranscriptStore> open(const std::filesystem::path& path);
  // Read-only view over one JSONL file or every *.jsonl file in a directory
  // (sorted by name). Throws MissingTranscriptError if the path is absent.
  static std::unique_ptr<TranscriptStore> load(const std::filesystem::path& path);

  TranscriptStore(const TranscriptStore&) = delete;
  TranscriptStore& operator=(const TranscriptStore&) = delete;

  std::optional<TranscriptRecord> find(const std::string& key) const;
  // Returns false when the key was already present (nothing written).
  bool append(const TranscriptRecord& record);

  std::size_t size() const;
  std::vector<TranscriptRecord> records() const;  // insertion order
  const std::filesystem::path& path() const { return path_; }

 private:
  void ingest_file(const std::filesystem::path& path);
  bool insert_locked(const TranscriptRecord& record);

  mutable std::mutex mu_;
  std::filesystem::path path_;
  std::ofstream out_;
  std::vector<TranscriptRecord> records_;
  std::unordered_map<std::string, std::size_t> by_key_;
};

}  // namespace igs
