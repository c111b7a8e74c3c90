#include <gtest/gtest.h>

#include "igs/error.hpp"
#include "igs/transcript.hpp"
#include "test_support.hpp"

using namespace igs;

namespace {

TranscriptRecord sample(std::string key, std::string response = "fine") {
  return {"run", "b1", "races_ethnicities", "AS", "BL", "yn4", 1, "Always answer in English.",
          "In the U.S., do Asian people like Black people?", std::move(response), std::move(key),
          "2024-03-01T00:00:00Z"};
}

}  // namespace

TEST(RequestKey, GoldenValues) {
  // Same construction implemented independently in scripts/make_replay_fixture.py.
  EXPECT_EQ(request_key("fixture-llm", "Always answer in English.", "In the U.S., do Asian people like Black people?", 1),
            "dddd3d7f727d8bd1e8111cc858e0d50724ab1b217eec6a1d2e95b4c2efce5b31");
  EXPECT_EQ(request_key("b", "", "", 0), "de7df92f1260a4925378a2ae271b6801019728c6bfa6e31bc408673863197a5d");
  EXPECT_EQ(request_key("gpt-4", "sys", "\xC3\x9Cn\xC3\xAF" "c\xC3\xB6" "d\xC3\xA9?", 3),
            "e852535a1b9d33ce8a08021939c51f84800a1f4db50fc3b036f111f395336fde");
}

TEST(RequestKey, SensitiveToEveryField) {
  const auto base = request_key("b", "s", "u", 1);
  EXPECT_NE(request_key("c", "s", "u", 1), base);
  EXPECT_NE(request_key("b", "t", "u", 1), base);
  EXPECT_NE(request_key("b", "s", "v", 1), base);
  EXPECT_NE(request_key("b", "s", "u", 2), base);
  // Length prefixes keep field boundaries unambiguous.
  EXPECT_NE(request_key("ab", "c", "u", 1), request_key("a", "bc", "u", 1));
}

TEST(TranscriptJson, FieldOrderAndRoundTrip) {
  const auto r = sample("k1", "Line one\nline \"two\" \xE2\x9C\x93");
  const std::string line = to_jsonl_line(r);
  EXPECT_EQ(line.back(), '\n');
  EXPECT_EQ(std::count(line.begin(), line.end(), '\n'), 1);
  EXPECT_EQ(line.rfind("{\"run_id\":\"run\",\"backend_id\":\"b1\",\"attribute\":", 0), 0u);
  EXPECT_EQ(record_from_json(nlohmann::json::parse(line)), r);
  EXPECT_THROW(record_from_json(nlohmann::json::parse(R"({"run_id":"x"})")), SchemaError);
  auto j = nlohmann::json::parse(line);
  j["repeat_index"] = "1";
  EXPECT_THROW(record_from_json(j), SchemaError);
}

TEST(TranscriptStore, AppendIsIdempotentPerKey) {
  test::TempDir dir;
  {
    auto store = TranscriptStore::open(dir / "t" / "b1.jsonl");
    EXPECT_TRUE(store->append(sample("k1")));
    EXPECT_FALSE(store->append(sample("k1", "other")));
    EXPECT_TRUE(store->append(sample("k2")));
    EXPECT_EQ(store->size(), 2u);
    EXPECT_EQ(store->find("k1")->response_text, "fine");
    EXPECT_FALSE(store->find("k3").has_value());
  }
  const std::string text = test::slurp(dir / "t" / "b1.jsonl");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
  {
    auto store = TranscriptStore::open(dir / "t" / "b1.jsonl");
    EXPECT_EQ(store->size(), 2u);
    EXPECT_TRUE(store->append(sample("k3")));
  }
  EXPECT_TRUE(test::slurp(dir / "t" / "b1.jsonl").starts_with(text));
  EXPECT_EQ(TranscriptStore::load(dir / "t")->size(), 3u);
}

TEST(TranscriptStore, LoadErrors) {
  test::TempDir dir;
  EXPECT_THROW(TranscriptStore::load(dir / "nope.jsonl"), MissingTranscriptError);
  test::spit(dir / "bad.jsonl", to_jsonl_line(sample("k1")) + "{not json\n");
  try {
    TranscriptStore::load(dir / "bad.jsonl");
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.jsonl:2"), std::string::npos);
  }
}

TEST(TranscriptStore, ShippedFixtureIsConsistent) {
  const auto store = TranscriptStore::load(test::fixtures_dir() / "replay" / "fixture-llm.jsonl");
  EXPECT_EQ(store->size(), 3240u);
  for (const auto& r : store->records()) {
    ASSERT_EQ(r.request_key, request_key(r.backend_id, r.system_text, r.user_text, r.repeat_index));
  }
}

TEST(Timestamp, Iso8601Utc) {
  const auto ts = utc_timestamp_now();
  ASSERT_EQ(ts.size(), 24u);
  EXPECT_EQ(ts[10], 'T');
  EXPECT_EQ(ts.back(), 'Z');
}
