#include <gtest/gtest.h>

#include <httplib.h>

#include <cstdlib>
#include <functional>
#include <thread>

#include "igs/error.hpp"
#include "igs/gateway.hpp"
#include "test_support.hpp"

using namespace igs;

namespace {

// Minimal chat-completions server. The handler sees every request; the
// default one echoes the user message.
class StubServer {
 public:
  using Handler = std::function<void(const nlohmann::json& body, const httplib::Request&, httplib::Response&)>;

  explicit StubServer(Handler handler = {}) : handler_(std::move(handler)) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      const int n = ++requests_;
      const auto body = nlohmann::json::parse(req.body);
      {
        std::lock_guard lock(mu_);
        bodies_.push_back(body);
        auth_.push_back(req.get_header_value("Authorization"));
      }
      (void)n;
      if (handler_) {
        handler_(body, req, res);
      } else {
        reply(res, "Reply to: " + body["messages"][1]["content"].get<std::string>());
      }
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }

  static void reply(httplib::Response& res, const std::string& content) {
    const nlohmann::json out = {{"choices", {{{"index", 0}, {"message", {{"role", "assistant"}, {"content", content}}}}}}};
    res.set_content(out.dump(), "application/json");
  }

  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions"; }
  int requests() const { return requests_.load(); }
  std::vector<nlohmann::json> bodies() const {
    std::lock_guard lock(mu_);
    return bodies_;
  }
  std::vector<std::string> auth() const {
    std::lock_guard lock(mu_);
    return auth_;
  }

 private:
  Handler handler_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  std::atomic<int> requests_{0};
  mutable std::mutex mu_;
  std::vector<nlohmann::json> bodies_;
  std::vector<std::string> auth_;
};

BackendDescriptor http_backend(const StubServer& server) {
  BackendDescriptor b;
  b.backend_id = "stub";
  b.kind = BackendKind::http_chat;
  b.endpoint = server.endpoint();
  b.model = "stub-model";
  b.requests_per_second = 0;
  b.retry.max_attempts = 3;
  b.retry.base_delay = std::chrono::milliseconds(1);
  b.retry.max_delay = std::chrono::milliseconds(5);
  b.timeout = std::chrono::milliseconds(5000);
  return b;
}

std::vector<Prompt> races_plan() {
  return build_plan(AttributeKind::races_ethnicities, default_roster(AttributeKind::races_ethnicities),
                    QuestionTypeSetting::yes_no_only);
}

Gateway gateway_for(const BackendDescriptor& b, std::shared_ptr<TranscriptStore> store = nullptr) {
  return Gateway(std::shared_ptr<ChatBackend>(make_backend(b)), store ? store : std::make_shared<TranscriptStore>(),
                 "run-1");
}

}  // namespace

TEST(Backend, IdValidation) {
  EXPECT_NO_THROW(validate_backend_id("gpt-4o_mini.2024"));
  EXPECT_THROW(validate_backend_id(""), ConfigError);
  EXPECT_THROW(validate_backend_id("a/b"), ConfigError);
  EXPECT_THROW(validate_backend_id(".."), ConfigError);
}

TEST(Backend, BackoffGrowsAndCaps) {
  RetryPolicy p;
  EXPECT_EQ(p.backoff(1).count(), 1000);
  EXPECT_EQ(p.backoff(2).count(), 2000);
  EXPECT_EQ(p.backoff(3).count(), 4000);
  EXPECT_EQ(p.backoff(10).count(), 30000);
}

TEST(HttpChat, RequestBodyShape) {
  BackendDescriptor b;
  b.backend_id = "x";
  b.model = "m";
  b.generation_params = {{"temperature", 0.7}, {"max_tokens", 256}};
  Prompt p{"Always answer in English.", "Do Thai people like Korean people?", {}, {}, "yn4", 1};
  const auto body = HttpChatBackend::request_body(b, p);
  EXPECT_EQ(body["model"], "m");
  EXPECT_EQ(body["temperature"], 0.7);
  EXPECT_EQ(body["max_tokens"], 256);
  ASSERT_EQ(body["messages"].size(), 2u);
  EXPECT_EQ(body["messages"][0]["role"], "system");
  EXPECT_EQ(body["messages"][0]["content"], "Always answer in English.");
  EXPECT_EQ(body["messages"][1]["role"], "user");
  EXPECT_EQ(body["messages"][1]["content"], "Do Thai people like Korean people?");
}

TEST(HttpChat, PlanOf216AndWarmCache) {
  StubServer server;
  const auto plan = races_plan();
  ASSERT_EQ(plan.size(), 216u);
  test::TempDir dir;
  const auto path = dir / "stub.jsonl";
  {
    std::shared_ptr<TranscriptStore> store = TranscriptStore::open(path);
    auto gw = gateway_for(http_backend(server), store);
    const auto result = gw.run_plan(plan, 8);
    ASSERT_EQ(result.records.size(), 216u);
    EXPECT_TRUE(result.failures.empty());
    EXPECT_EQ(result.cache_hits, 0u);
    for (std::size_t i = 0; i < plan.size(); ++i) {
      EXPECT_EQ(result.records[i].user_text, plan[i].user_text);
      EXPECT_EQ(result.records[i].repeat_index, plan[i].repeat_index);
      EXPECT_EQ(result.records[i].response_text, "Reply to: " + plan[i].user_text);
      EXPECT_EQ(result.records[i].run_id, "run-1");
    }
  }
  EXPECT_EQ(server.requests(), 216);

  std::shared_ptr<TranscriptStore> store = TranscriptStore::open(path);
  auto gw = gateway_for(http_backend(server), store);
  const auto again = gw.run_plan(plan, 8);
  EXPECT_EQ(again.records.size(), 216u);
  EXPECT_EQ(again.cache_hits, 216u);
  EXPECT_EQ(server.requests(), 216);
  EXPECT_EQ(gw.backend().requests_sent(), 0u);
}

TEST(HttpChat, ParallelismDoesNotChangeOutput) {
  StubServer server;
  const auto plan = races_plan();
  std::vector<std::vector<std::string>> outputs;
  for (std::size_t par : {1u, 4u, 32u}) {
    auto gw = gateway_for(http_backend(server));
    const auto result = gw.run_plan(plan, par);
    std::vector<std::string> texts;
    for (const auto& r : result.records) texts.push_back(r.request_key + "|" + r.response_text);
    outputs.push_back(std::move(texts));
  }
  EXPECT_EQ(outputs[0], outputs[1]);
  EXPECT_EQ(outputs[0], outputs[2]);
}

TEST(HttpChat, SendsBearerToken) {
  StubServer server;
  ::setenv("IGS_TEST_TOKEN", "secret-123", 1);
  auto b = http_backend(server);
  b.auth_env = "IGS_TEST_TOKEN";
  auto gw = gateway_for(b);
  gw.complete(races_plan()[0]);
  ASSERT_EQ(server.auth().size(), 1u);
  EXPECT_EQ(server.auth()[0], "Bearer secret-123");
  EXPECT_EQ(server.bodies()[0]["model"], "stub-model");
}

TEST(HttpChat, MissingCredentialIsAuthError) {
  StubServer server;
  ::unsetenv("IGS_TEST_MISSING_TOKEN");
  auto b = http_backend(server);
  b.auth_env = "IGS_TEST_MISSING_TOKEN";
  auto gw = gateway_for(b);
  EXPECT_THROW(gw.complete(races_plan()[0]), AuthError);
  EXPECT_EQ(server.requests(), 0);
}

TEST(HttpChat, RejectedCredentialIsNotRetried) {
  StubServer server([](const auto&, const auto&, httplib::Response& res) { res.status = 401; });
  auto gw = gateway_for(http_backend(server));
  EXPECT_THROW(gw.complete(races_plan()[0]), AuthError);
  EXPECT_EQ(server.requests(), 1);
}

TEST(HttpChat, RetriesTransientErrors) {
  std::atomic<int> calls{0};
  StubServer server([&](const nlohmann::json&, const auto&, httplib::Response& res) {
    if (++calls <= 2) {
      res.status = 503;
      return;
    }
    StubServer::reply(res, "ok");
  });
  auto gw = gateway_for(http_backend(server));
  EXPECT_EQ(gw.complete(races_plan()[0]), "ok");
  EXPECT_EQ(server.requests(), 3);
  EXPECT_EQ(gw.backend().requests_sent(), 3u);
}

TEST(HttpChat, ExhaustedRateLimit) {
  StubServer server([](const auto&, const auto&, httplib::Response& res) {
    res.status = 429;
    res.set_header("Retry-After", "0");
  });
  auto gw = gateway_for(http_backend(server));
  EXPECT_THROW(gw.complete(races_plan()[0]), RateLimitError);
  EXPECT_EQ(server.requests(), 3);
}

TEST(HttpChat, ConnectionFailureIsTransportError) {
  BackendDescriptor b;
  b.backend_id = "down";
  b.kind = BackendKind::http_chat;
  b.endpoint = "http://127.0.0.1:1/v1/chat/completions";
  b.requests_per_second = 0;
  b.retry.max_attempts = 2;
  b.retry.base_delay = std::chrono::milliseconds(1);
  b.retry.max_delay = std::chrono::milliseconds(1);
  b.timeout = std::chrono::milliseconds(500);
  auto gw = gateway_for(b);
  EXPECT_THROW(gw.complete(races_plan()[0]), TransportError);
}

TEST(HttpChat, MalformedResponseIsTransportError) {
  StubServer server([](const auto&, const auto&, httplib::Response& res) {
    res.set_content(R"({"choices":[]})", "application/json");
  });
  auto gw = gateway_for(http_backend(server));
  EXPECT_THROW(gw.complete(races_plan()[0]), TransportError);
}

TEST(RunPlan, FailureFraction) {
  // Permanently rejects every prompt about White people as the subject.
  StubServer server([](const nlohmann::json& body, const auto&, httplib::Response& res) {
    const std::string user = body["messages"][1]["content"];
    if (user.find("do White people") != std::string::npos) {
      res.status = 400;
      return;
    }
    StubServer::reply(res, "ok");
  });
  const auto plan = races_plan();
  {
    auto gw = gateway_for(http_backend(server));
    EXPECT_THROW(gw.run_plan(plan, 4), RunAbortedError);
  }
  auto store = std::make_shared<TranscriptStore>();
  auto gw = gateway_for(http_backend(server), store);
  const auto result = gw.run_plan(plan, 4, 0.5);
  EXPECT_EQ(result.failures.size(), 3u * 6u * 3u);  // 3 targets x 6 templates x 3 repeats
  EXPECT_EQ(result.records.size() + result.failures.size(), plan.size());
  for (const auto& f : result.failures) EXPECT_EQ(f.error, "TransportError");
  EXPECT_EQ(store->size(), result.records.size());
}

TEST(RunPlan, ResumesOnlyMissingPrompts) {
  StubServer server;
  const auto plan = races_plan();
  auto store = std::make_shared<TranscriptStore>();
  {
    auto gw = gateway_for(http_backend(server), store);
    gw.run_plan(std::span<const Prompt>(plan).first(100), 4);
  }
  auto gw = gateway_for(http_backend(server), store);
  const auto result = gw.run_plan(plan, 4);
  EXPECT_EQ(result.cache_hits, 100u);
  EXPECT_EQ(server.requests(), 216);
}

TEST(RateLimiter, SpacesRequests) {
  RateLimiter limiter(20.0);
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < 6; ++i) limiter.acquire();
  EXPECT_GE(std::chrono::steady_clock::now() - start, std::chrono::milliseconds(240));
}

TEST(Replay, ServesFixtureRecords) {
  BackendDescriptor b;
  b.backend_id = "fixture-llm";
  b.kind = BackendKind::replay;
  b.fixture = test::fixtures_dir() / "replay" / "fixture-llm.jsonl";
  auto store = std::make_shared<TranscriptStore>();
  auto gw = gateway_for(b, store);
  const auto plan = races_plan();
  const auto result = gw.run_plan(plan, 4);
  ASSERT_EQ(result.records.size(), 216u);
  EXPECT_EQ(result.records[0].timestamp, "2024-03-01T00:00:00Z");
  EXPECT_EQ(result.records[0].run_id, "run-1");
  EXPECT_EQ(store->size(), 216u);
}

TEST(Replay, MissNamesTheKey) {
  BackendDescriptor b;
  b.backend_id = "other-backend";
  b.kind = BackendKind::replay;
  b.fixture = test::fixtures_dir() / "replay" / "fixture-llm.jsonl";
  auto gw = gateway_for(b);
  const auto p = races_plan()[0];
  try {
    gw.complete(p);
    FAIL() << "expected ReplayMissError";
  } catch (const ReplayMissError& e) {
    EXPECT_NE(std::string(e.what()).find(request_key_for(b, p)), std::string::npos);
  }
}
