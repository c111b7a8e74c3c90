#include "igs/transcript.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>

#include "igs/error.hpp"
#include "igs/hashing.hpp"

namespace igs {

std::string request_key(std::string_view backend_id, std::string_view system_text,
                        std::string_view user_text, int repeat_index) {
  std::string buf = "igs.request_key.v1";
  const std::string repeat = std::to_string(repeat_index);
  for (std::string_view part : {backend_id, system_text, user_text, std::string_view(repeat)}) {
    buf += "\n";
    buf += std::to_string(part.size());
    buf += ":";
    buf += part;
  }
  return sha256_hex(buf);
}

nlohmann::ordered_json to_json(const TranscriptRecord& r) {
  nlohmann::ordered_json j;
  j["run_id"] = r.run_id;
  j["backend_id"] = r.backend_id;
  j["attribute"] = r.attribute;
  j["from_code"] = r.from_code;
  j["to_code"] = r.to_code;
  j["template_id"] = r.template_id;
  j["repeat_index"] = r.repeat_index;
  j["system_text"] = r.system_text;
  j["user_text"] = r.user_text;
  j["response_text"] = r.response_text;
  j["request_key"] = r.request_key;
  j["timestamp"] = r.timestamp;
  return j;
}

TranscriptRecord record_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaError("transcript record is not a JSON object");
  const auto str = [&](const char* field) -> std::string {
    const auto it = j.find(field);
    if (it == j.end() || !it->is_string()) {
      throw SchemaError(std::string("transcript record field '") + field + "' missing or not a string");
    }
    return it->get<std::string>();
  };
  TranscriptRecord r;
  r.run_id = str("run_id");
  r.backend_id = str("backend_id");
  r.attribute = str("attribute");
  r.from_code = str("from_code");
  r.to_code = str("to_code");
  r.template_id = str("template_id");
  const auto rep = j.find("repeat_index");
  if (rep == j.end() || !rep->is_number_integer()) {
    throw SchemaError("transcript record field 'repeat_index' missing or not an integer");
  }
  r.repeat_index = rep->get<int>();
  r.system_text = str("system_text");
  r.user_text = str("user_text");
  r.response_text = str("response_text");
  r.request_key = str("request_key");
  r.timestamp = str("timestamp");
  return r;
}

std::string to_jsonl_line(const TranscriptRecord& record) {
  return to_json(record).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
}

std::string utc_timestamp_now() {
  using namespace std::chrono;
  const auto now = system_clock::now();
  const std::time_t t = system_clock::to_time_t(now);
  const auto ms = duration_cast<milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[40];
  std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
  return out;
}

void TranscriptStore::ingest_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingTranscriptError("cannot read transcript " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      insert_locked(record_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const SchemaError& e) {
      throw SchemaError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

std::unique_ptr<TranscriptStore> TranscriptStore::open(const std::filesystem::path& path) {
  auto store = std::make_unique<TranscriptStore>();
  store->path_ = path;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  if (std::filesystem::exists(path)) store->ingest_file(path);
  store->out_.open(path, std::ios::binary | std::ios::app);
  if (!store->out_) throw MissingTranscriptError("cannot open transcript for append: " + path.string());
  return store;
}

std::unique_ptr<TranscriptStore> TranscriptStore::load(const std::filesystem::path& path) {
  auto store = std::make_unique<TranscriptStore>();
  store->path_ = path;
  if (!std::filesystem::exists(path)) throw MissingTranscriptError("transcript not found: " + path.string());
  if (std::filesystem::is_directory(path)) {
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(path)) {
      if (e.is_regular_file() && e.path().extension() == ".jsonl") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) store->ingest_file(f);
  } else {
    store->ingest_file(path);
  }
  return store;
}

bool TranscriptStore::insert_locked(const TranscriptRecord& record) {
  if (by_key_.contains(record.request_key)) return false;
  by_key_.emplace(record.request_key, records_.size());
  records_.push_back(record);
  return true;
}

std::optional<TranscriptRecord> TranscriptStore::find(const std::string& key) const {
  std::lock_guard lock(mu_);
  const auto it = by_key_.find(key);
  if (it == by_key_.end()) return std::nullopt;
  return records_[it->second];
}

bool TranscriptStore::append(const TranscriptRecord& record) {
  std::lock_guard lock(mu_);
  if (!insert_locked(record)) return false;
  if (out_.is_open()) {
    out_ << to_jsonl_line(record);
    out_.flush();
  }
  return true;
}

std::size_t TranscriptStore::size() const {
  std::lock_guard lock(mu_);
  return records_.size();
}

std::vector<TranscriptRecord> TranscriptStore::records() const {
  std::lock_guard lock(mu_);
  return records_;
}

}  // namespace igs
