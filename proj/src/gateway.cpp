#include "igs/gateway.hpp"

#include <httplib.h>

#include <algorithm>
#include <cstdlib>
#include <random>
#include <thread>

#include "igs/error.hpp"

namespace igs {

std::chrono::milliseconds RetryPolicy::backoff(int attempt) const {
  const int shift = std::clamp(attempt - 1, 0, 30);
  const auto raw = base_delay.count() * (std::int64_t{1} << shift);
  return std::chrono::milliseconds(std::min<std::int64_t>(raw, max_delay.count()));
}

void validate_backend_id(const std::string& backend_id) {
  if (backend_id.empty()) throw ConfigError("backend_id must not be empty");
  if (backend_id == "." || backend_id == "..") throw ConfigError("backend_id '" + backend_id + "' is reserved");
  for (char c : backend_id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_' || c == '.';
    if (!ok) throw ConfigError("backend_id '" + backend_id + "' must use only [A-Za-z0-9._-]");
  }
}

std::string request_key_for(const BackendDescriptor& backend, const Prompt& prompt) {
  return request_key(backend.backend_id, prompt.system_text, prompt.user_text, prompt.repeat_index);
}

RateLimiter::RateLimiter(double requests_per_second) {
  if (requests_per_second > 0) {
    interval_ = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
        std::chrono::duration<double>(1.0 / requests_per_second));
  }
}

void RateLimiter::acquire() {
  if (interval_ == std::chrono::steady_clock::duration::zero()) return;
  std::chrono::steady_clock::time_point slot;
  {
    std::lock_guard lock(mu_);
    const auto now = std::chrono::steady_clock::now();
    slot = std::max(now, next_);
    next_ = slot + interval_;
  }
  std::this_thread::sleep_until(slot);
}

namespace {

std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("endpoint '" + url + "' is not an absolute URL");
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

std::chrono::milliseconds jittered(std::chrono::milliseconds d, double jitter) {
  thread_local std::mt19937_64 rng{std::random_device{}()};
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double factor = 1.0 - std::clamp(jitter, 0.0, 1.0) * u(rng);
  return std::chrono::milliseconds(static_cast<std::int64_t>(static_cast<double>(d.count()) * factor));
}

}  // namespace

HttpChatBackend::HttpChatBackend(BackendDescriptor descriptor)
    : descriptor_(std::move(descriptor)), limiter_(descriptor_.requests_per_second) {
  validate_backend_id(descriptor_.backend_id);
  if (descriptor_.model.empty()) descriptor_.model = descriptor_.backend_id;
  std::tie(origin_, path_) = split_url(descriptor_.endpoint);
  if (descriptor_.retry.max_attempts < 1) throw ConfigError("retry.max_attempts must be >= 1");
}

nlohmann::json HttpChatBackend::request_body(const BackendDescriptor& descriptor, const Prompt& prompt) {
  nlohmann::json body = nlohmann::json::object();
  if (descriptor.generation_params.is_object()) body = descriptor.generation_params;
  body["model"] = descriptor.model.empty() ? descriptor.backend_id : descriptor.model;
  body["messages"] = nlohmann::json::array({
      {{"role", "system"}, {"content", prompt.system_text}},
      {{"role", "user"}, {"content", prompt.user_text}},
  });
  return body;
}

Exchange HttpChatBackend::send(const Prompt& prompt, const std::string& /*key*/) {
  httplib::Headers headers;
  if (!descriptor_.auth_env.empty()) {
    const char* token = std::getenv(descriptor_.auth_env.c_str());
    if (!token || !*token) {
      throw AuthError("credential variable " + descriptor_.auth_env + " for backend " +
                      descriptor_.backend_id + " is not set");
    }
    headers.emplace("Authorization", std::string("Bearer ") + token);
  }
  const std::string body = request_body(descriptor_, prompt).dump();
  const auto timeout = descriptor_.timeout;
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);

  std::string last_error;
  bool rate_limited = false;
  for (int attempt = 1; attempt <= descriptor_.retry.max_attempts; ++attempt) {
    if (attempt > 1) {
      std::this_thread::sleep_for(jittered(descriptor_.retry.backoff(attempt - 1), descriptor_.retry.jitter));
    }
    limiter_.acquire();
    ++requests_sent_;

    httplib::Client client(origin_);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    const auto res = client.Post(path_, headers, body, "application/json");

    if (!res) {
      last_error = "request failed: " + httplib::to_string(res.error());
      rate_limited = false;
      continue;
    }
    const int status = res->status;
    if (status == 429 || status >= 500) {
      rate_limited = status == 429;
      last_error = "HTTP " + std::to_string(status);
      if (rate_limited && res->has_header("Retry-After")) {
        const int wait = std::atoi(res->get_header_value("Retry-After").c_str());
        if (wait > 0 && attempt < descriptor_.retry.max_attempts) {
          std::this_thread::sleep_for(std::min(std::chrono::milliseconds(wait * 1000LL), descriptor_.retry.max_delay));
        }
      }
      continue;
    }
    if (status == 401 || status == 403) {
      throw AuthError("backend " + descriptor_.backend_id + " rejected the credential (HTTP " +
                      std::to_string(status) + ")");
    }
    if (status < 200 || status >= 300) {
      throw TransportError("backend " + descriptor_.backend_id + " returned HTTP " + std::to_string(status) +
                           ": " + res->body.substr(0, 200));
    }
    nlohmann::json parsed = nlohmann::json::parse(res->body, nullptr, false);
    if (parsed.is_discarded()) {
      throw TransportError("backend " + descriptor_.backend_id + " returned a non-JSON body");
    }
    const auto* content = [&]() -> const nlohmann::json* {
      if (!parsed.contains("choices") || !parsed["choices"].is_array() || parsed["choices"].empty()) return nullptr;
      const auto& choice = parsed["choices"][0];
      if (!choice.contains("message") || !choice["message"].contains("content")) return nullptr;
      return &choice["message"]["content"];
    }();
    if (!content || !content->is_string()) {
      throw TransportError("backend " + descriptor_.backend_id + " response has no choices[0].message.content");
    }
    return Exchange{content->get<std::string>(), utc_timestamp_now()};
  }
  const std::string msg = "backend " + descriptor_.backend_id + " failed after " +
                          std::to_string(descriptor_.retry.max_attempts) + " attempts: " + last_error;
  if (rate_limited) throw RateLimitError(msg);
  throw TransportError(msg);
}

ReplayBackend::ReplayBackend(BackendDescriptor descriptor)
    : ReplayBackend(descriptor, std::shared_ptr<const TranscriptStore>(TranscriptStore::load(descriptor.fixture))) {}

ReplayBackend::ReplayBackend(BackendDescriptor descriptor, std::shared_ptr<const TranscriptStore> fixture)
    : descriptor_(std::move(descriptor)), fixture_(std::move(fixture)) {
  validate_backend_id(descriptor_.backend_id);
  if (!fixture_) throw ConfigError("replay backend " + descriptor_.backend_id + " has no transcript store");
}

Exchange ReplayBackend::send(const Prompt& prompt, const std::string& key) {
  ++requests_sent_;
  const auto rec = fixture_->find(key);
  if (!rec) {
    throw ReplayMissError("replay backend " + descriptor_.backend_id + " has no record for request_key " + key +
                          " (\"" + prompt.user_text + "\", repeat " + std::to_string(prompt.repeat_index) + ")");
  }
  return Exchange{rec->response_text, rec->timestamp};
}

std::unique_ptr<ChatBackend> make_backend(const BackendDescriptor& descriptor) {
  if (descriptor.kind == BackendKind::http_chat) return std::make_unique<HttpChatBackend>(descriptor);
  return std::make_unique<ReplayBackend>(descriptor);
}

Gateway::Gateway(std::shared_ptr<ChatBackend> backend, std::shared_ptr<TranscriptStore> store, std::string run_id)
    : backend_(std::move(backend)), store_(std::move(store)), run_id_(std::move(run_id)) {
  if (!backend_) throw ConfigError("gateway needs a backend");
  if (!store_) store_ = std::make_shared<TranscriptStore>();
}

TranscriptRecord Gateway::complete_record(const Prompt& prompt, bool* cache_hit) {
  const auto& desc = backend_->descriptor();
  const std::string key = request_key_for(desc, prompt);
  if (auto cached = store_->find(key)) {
    if (cache_hit) *cache_hit = true;
    return *cached;
  }
  if (cache_hit) *cache_hit = false;
  Exchange ex = backend_->send(prompt, key);
  TranscriptRecord rec{run_id_,
                       desc.backend_id,
                       std::string(to_string(prompt.attribute())),
                       prompt.from.code,
                       prompt.to.code,
                       prompt.template_id,
                       prompt.repeat_index,
                       prompt.system_text,
                       prompt.user_text,
                       std::move(ex.response_text),
                       key,
                       std::move(ex.timestamp)};
  if (!store_->append(rec)) {
    // Another worker recorded the same slot first; keep the stored one.
    if (auto stored = store_->find(key)) return *stored;
  }
  return rec;
}

std::string Gateway::complete(const Prompt& prompt) { return complete_record(prompt).response_text; }

namespace {

std::string error_class(const std::exception& e) {
  if (dynamic_cast<const AuthError*>(&e)) return "AuthError";
  if (dynamic_cast<const RateLimitError*>(&e)) return "RateLimitError";
  if (dynamic_cast<const TransportError*>(&e)) return "TransportError";
  if (dynamic_cast<const ReplayMissError*>(&e)) return "ReplayMissError";
  if (dynamic_cast<const Error*>(&e)) return "Error";
  return "UnexpectedError";
}

}  // namespace

PlanResult Gateway::run_plan(std::span<const Prompt> plan, std::size_t parallelism, double max_failure_fraction) {
  if (parallelism < 1) throw std::invalid_argument("parallelism must be >= 1");
  PlanResult result;
  if (plan.empty()) return result;

  const auto allowed = static_cast<std::size_t>(max_failure_fraction * static_cast<double>(plan.size()) + 1e-9);
  std::vector<std::optional<TranscriptRecord>> slots(plan.size());
  std::vector<std::optional<PromptFailure>> failed(plan.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> failures{0};
  std::atomic<std::size_t> hits{0};
  std::atomic<bool> abort{false};

  const auto worker = [&] {
    while (!abort.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= plan.size()) return;
      try {
        bool hit = false;
        slots[i] = complete_record(plan[i], &hit);
        if (hit) ++hits;
      } catch (const std::exception& e) {
        failed[i] = PromptFailure{i, error_class(e), e.what()};
        if (++failures > allowed) abort.store(true);
      }
    }
  };

  const std::size_t threads = std::min(parallelism, plan.size());
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (std::size_t i = 0; i < plan.size(); ++i) {
    if (slots[i]) result.records.push_back(std::move(*slots[i]));
    if (failed[i]) result.failures.push_back(std::move(*failed[i]));
  }
  result.cache_hits = hits.load();
  if (result.failures.size() > allowed) {
    const auto& first = result.failures.front();
    throw RunAbortedError(std::to_string(result.failures.size()) + " of " + std::to_string(plan.size()) +
                          " prompts failed for backend " + backend_->descriptor().backend_id + "; first: " +
                          first.error + ": " + first.message);
  }
  return result;
}

}  // namespace igs
