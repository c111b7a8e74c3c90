#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "igs/prompts.hpp"
#include "igs/transcript.hpp"

namespace igs {

enum class BackendKind { http_chat, replay };

struct RetryPolicy {
  int max_attempts = 5;
  std::chrono::milliseconds base_delay{1000};
  std::chrono::milliseconds max_delay{30000};
  double jitter = 0.5;  // fraction of each delay that is randomized

  // Delay before retry number `attempt` (1-based), before jitter.
  std::chrono::milliseconds backoff(int attempt) const;
};

struct BackendDescriptor {
  std::string backend_id;
  BackendKind kind = BackendKind::replay;
  // http_chat
  std::string endpoint;  // full URL of the chat-completions route
  std::string model;     // defaults to backend_id
  std::string auth_env;  // bearer token variable; empty means no auth header
  nlohmann::json generation_params = nlohmann::json::object();  // merged into the request body
  std::chrono::milliseconds timeout{60000};
  RetryPolicy retry;
  double requests_per_second = 2.0;  // <= 0 disables the limiter
  // replay
  std::filesystem::path fixture;  // JSONL file or directory of JSONL files
};

// Throws ConfigError if the id is empty or not usable as a file name.
void validate_backend_id(const std::string& backend_id);

struct Exchange {
  std::string response_text;
  std::string timestamp;
};

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  // One stateless system + user exchange.
  virtual Exchange send(const Prompt& prompt, const std::string& key) = 0;
  virtual const BackendDescriptor& descriptor() const = 0;
  // Number of exchanges attempted against the underlying service.
  std::size_t requests_sent() const { return requests_sent_.load(); }

 protected:
  std::atomic<std::size_t> requests_sent_{0};
};

// Minimum spacing between request starts, shared by all callers.
class RateLimiter {
 public:
  explicit RateLimiter(double requests_per_second);
  void acquire();

 private:
  std::mutex mu_;
  std::chrono::steady_clock::duration interval_{};
  std::chrono::steady_clock::time_point next_{};
};

// OpenAI-compatible chat-completions client. Retries 429 and 5xx responses
// and connection failures with exponential backoff and jitter.
class HttpChatBackend final : public ChatBackend {
 public:
  explicit HttpChatBackend(BackendDescriptor descriptor);

  Exchange send(const Prompt& prompt, const std::string& key) override;
  const BackendDescriptor& descriptor() const override { return descriptor_; }

  static nlohmann::json request_body(const BackendDescriptor& descriptor, const Prompt& prompt);

 private:
  BackendDescriptor descriptor_;
  std::string origin_;  // scheme://host[:port]
  std::string path_;
  RateLimiter limiter_;
};

// Serves recorded responses by request key.
class ReplayBackend final : public ChatBackend {
 public:
  explicit ReplayBackend(BackendDescriptor descriptor);
  ReplayBackend(BackendDescriptor descriptor, std::shared_ptr<const TranscriptStore> fixture);

  Exchange send(const Prompt& prompt, const std::string& key) override;
  const BackendDescriptor& descriptor() const override { return descriptor_; }

 private:
  BackendDescriptor descriptor_;
  std::shared_ptr<const TranscriptStore> fixture_;
};

std::unique_ptr<ChatBackend> make_backend(const BackendDescriptor& descriptor);

struct PromptFailure {
  std::size_t plan_index = 0;
  std::string error;  // error class
  std::string message;
};

struct PlanResult {
  std::vector<TranscriptRecord> records;  // plan order, failed prompts omitted
  std::vector<PromptFailure> failures;
  std::size_t cache_hits = 0;
};

// Routes prompts to a backend through a run-level transcript store that acts
// as a cache: known request keys are answered from the store, new exchanges
// are appended before they are returned.
class Gateway {
 public:
  Gateway(std::shared_ptr<ChatBackend> backend, std::shared_ptr<TranscriptStore> store, std::string run_id);

  std::string complete(const Prompt& prompt);
  TranscriptRecord complete_record(const Prompt& prompt, bool* cache_hit = nullptr);

  // Up to `parallelism` prompts in flight. Output follows plan order whatever
  // the completion order. Throws RunAbortedError when the failed share of the
  // plan exceeds max_failure_fraction; successful exchanges stay in the store.
  PlanResult run_plan(std::span<const Prompt> plan, std::size_t parallelism,
                      double max_failure_fraction = 0.0);

  const ChatBackend& backend() const { return *backend_; }

 private:
  std::shared_ptr<ChatBackend> backend_;
  std::shared_ptr<TranscriptStore> store_;
  std::string run_id_;
};

std::string request_key_for(const BackendDescriptor& backend, const Prompt& prompt);

}  // namespace igs
