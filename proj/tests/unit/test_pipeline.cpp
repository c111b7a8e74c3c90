#include <gtest/gtest.h>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cstdio>

#include "fixture_builder.hpp"
#include "igs/error.hpp"
#include "igs/matrix_csv.hpp"
#include "igs/pipeline.hpp"

using namespace igs;
namespace fs = std::filesystem;

namespace {

nlohmann::json oracle_grid() {
  return nlohmann::json::parse(test::slurp(test::test_data_dir() / "fixture_grid_expected.json"));
}

std::string oracle_cell(const std::string& combo) {
  const auto e = oracle_grid()[combo];
  char rho[32], p[32];
  std::snprintf(rho, sizeof rho, "%.4f", e["rho"].get<double>());
  std::snprintf(p, sizeof p, "%.4g", e["p"].get<double>());
  return std::string(rho) + ";" + p + ";" + std::to_string(e["n"].get<int>());
}

std::map<std::string, std::string> grid_cells(const fs::path& grid_csv) {
  std::istringstream in(test::slurp(grid_csv));
  std::string line, header;
  std::vector<std::string> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header.empty()) {
      header = line;
    } else {
      rows.push_back(line);
    }
  }
  const auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
  };
  const auto cols = split(header);
  std::map<std::string, std::string> cells;
  for (const auto& r : rows) {
    const auto v = split(r);
    for (std::size_t i = 1; i < v.size(); ++i) cells[v[0] + " " + cols[i]] = v[i];
  }
  return cells;
}

std::map<std::string, std::string> artifacts(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root / "matrices")) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = test::slurp(e.path());
  }
  out["grid.csv"] = test::slurp(root / "grid.csv");
  out["report.md"] = test::slurp(root / "report.md");
  return out;
}

RunOptions quiet(const fs::path& outdir, std::optional<std::size_t> parallelism = std::nullopt) {
  RunOptions o;
  o.outdir = outdir;
  o.parallelism = parallelism;
  return o;
}

}  // namespace

TEST(CmdRun, RacesYesNoGolden) {
  test::TempDir dir;
  auto j = test::fixture_config_json("races");
  j["attributes"] = {{"races_ethnicities", j["attributes"]["races_ethnicities"]}};
  j["settings"] = {"yes_no_only"};
  EXPECT_EQ(cmd_run(test::make_config(j), quiet(dir.path())), kExitOk);

  const RunPaths paths(dir.path(), "races");
  const auto m = score_matrix_from_csv(
      AttributeKind::races_ethnicities,
      test::slurp(paths.means("fixture-llm", AttributeKind::races_ethnicities, QuestionTypeSetting::yes_no_only)),
      test::slurp(paths.counts("fixture-llm", AttributeKind::races_ethnicities, QuestionTypeSetting::yes_no_only)));
  EXPECT_EQ(m.cells.size(), 12u);
  for (const auto& [_, cell] : m.cells) EXPECT_EQ(cell.count, 18u);

  const auto expected = oracle_grid()["races_ethnicities/yes_no_only"]["means"];
  for (const auto& [key, cell] : m.cells) {
    EXPECT_NEAR(cell.mean, expected[key.first + ">" + key.second].get<double>(), 1e-9);
  }

  const auto grid = grid_cells(paths.grid());
  ASSERT_EQ(grid.size(), 1u);
  EXPECT_EQ(grid.at("fixture-llm races_ethnicities/yes_no_only"), oracle_cell("races_ethnicities/yes_no_only"));
  EXPECT_FALSE(fs::exists(paths.partial_marker()));
  EXPECT_TRUE(fs::exists(paths.manifest()));
}

TEST(CmdRun, FullFixtureGridMatchesOracle) {
  test::TempDir dir;
  EXPECT_EQ(cmd_run(test::make_config(test::fixture_config_json()), quiet(dir.path())), kExitOk);
  const RunPaths paths(dir.path(), "fixture-run");
  const auto grid = grid_cells(paths.grid());
  EXPECT_EQ(grid.size(), 9u);
  for (auto kind : kAllAttributes) {
    for (auto s : kAllSettings) {
      const std::string combo = std::string(to_string(kind)) + "/" + std::string(to_string(s));
      EXPECT_EQ(grid.at("fixture-llm " + combo), oracle_cell(combo)) << combo;
    }
  }
  const auto manifest = nlohmann::json::parse(test::slurp(paths.manifest()));
  EXPECT_EQ(manifest["status"], "complete");
  EXPECT_EQ(manifest["backends"]["fixture-llm"]["unique_prompts"], 3240);
  for (const auto& c : manifest["combinations"]) EXPECT_EQ(c["records"], c["prompts"]);
}

TEST(CmdRun, MixedUsesSixTemplates) {
  test::TempDir dir;
  auto j = test::fixture_config_json("mixed");
  j["settings"] = {"mixed"};
  EXPECT_EQ(cmd_run(test::make_config(j), quiet(dir.path())), kExitOk);
  const RunPaths paths(dir.path(), "mixed");
  std::set<std::string> templates;
  for (const auto& r : TranscriptStore::load(paths.transcript("fixture-llm"))->records()) templates.insert(r.template_id);
  EXPECT_EQ(templates, (std::set<std::string>{"yn1", "yn3", "yn5", "wh1", "wh3", "wh5"}));
}

TEST(CmdRun, UnreadableReference) {
  test::TempDir dir;
  auto j = test::fixture_config_json("badref");
  j["attributes"]["religions"]["reference"] = (dir / "missing.csv").string();
  EXPECT_EQ(cmd_run(test::make_config(j), quiet(dir / "out")), kExitPartial);
  const RunPaths paths(dir / "out", "badref");
  EXPECT_FALSE(fs::exists(paths.grid()));
  EXPECT_FALSE(fs::exists(paths.report()));
  EXPECT_TRUE(fs::exists(paths.partial_marker()));
  EXPECT_NE(test::slurp(paths.partial_marker()).find("missing.csv"), std::string::npos);
  EXPECT_EQ(TranscriptStore::load(paths.transcript("fixture-llm"))->size(), 3240u);
  EXPECT_EQ(nlohmann::json::parse(test::slurp(paths.manifest()))["status"], "partial");
}

TEST(CmdRun, DeterministicAcrossRunsAndParallelism) {
  test::TempDir dir;
  const auto config = test::make_config(test::fixture_config_json());
  EXPECT_EQ(cmd_run(config, quiet(dir / "a", 1)), kExitOk);
  EXPECT_EQ(cmd_run(config, quiet(dir / "b", 8)), kExitOk);
  EXPECT_EQ(artifacts(dir / "a" / "fixture-run"), artifacts(dir / "b" / "fixture-run"));

  auto ma = nlohmann::json::parse(test::slurp(dir / "a" / "fixture-run" / "manifest.json"));
  auto mb = nlohmann::json::parse(test::slurp(dir / "b" / "fixture-run" / "manifest.json"));
  for (auto* m : {&ma, &mb}) {
    m->erase("started_at");
    m->erase("finished_at");
  }
  // The parallelism override is not part of the recorded configuration.
  EXPECT_EQ(ma, mb);
}

TEST(CmdRun, ResumeAndConflict) {
  test::TempDir dir;
  const auto config = test::make_config(test::fixture_config_json());
  EXPECT_EQ(cmd_run(config, quiet(dir.path())), kExitOk);
  const auto first = artifacts(dir / "fixture-run");
  const auto transcript = test::slurp(dir / "fixture-run" / "transcripts" / "fixture-llm.jsonl");
  EXPECT_EQ(cmd_run(config, quiet(dir.path())), kExitOk);
  EXPECT_EQ(artifacts(dir / "fixture-run"), first);
  EXPECT_EQ(test::slurp(dir / "fixture-run" / "transcripts" / "fixture-llm.jsonl"), transcript);

  auto j = test::fixture_config_json();
  j["repeats"] = 2;
  EXPECT_THROW(cmd_run(test::make_config(j), quiet(dir.path())), ConfigError);
}

TEST(CmdRun, EqualsRunThenScore) {
  test::TempDir dir;
  const auto config = test::make_config(test::fixture_config_json());
  EXPECT_EQ(cmd_run(config, quiet(dir.path())), kExitOk);
  const auto before = artifacts(dir / "fixture-run");
  EXPECT_EQ(cmd_score(dir.path(), "fixture-run", std::nullopt, quiet(dir.path())), kExitOk);
  EXPECT_EQ(artifacts(dir / "fixture-run"), before);
  EXPECT_EQ(cmd_score(dir.path(), "fixture-run", std::string("vader"), quiet(dir.path(), 3)), kExitOk);
  EXPECT_EQ(artifacts(dir / "fixture-run"), before);
  EXPECT_EQ(cmd_report(dir.path(), "fixture-run", quiet(dir.path())), kExitOk);
  EXPECT_EQ(artifacts(dir / "fixture-run"), before);
}

TEST(CmdScore, ExternalConstantZero) {
  test::TempDir dir;
  auto j = test::fixture_config_json();
  j["analyzers"] = {{{"id", "zero"}, {"kind", "external_command"}, {"command", {"/bin/sh", "-c", "cat >/dev/null; echo 0"}}}};
  j["attributes"] = {{"races_ethnicities", j["attributes"]["races_ethnicities"]}};
  EXPECT_EQ(cmd_run(test::make_config(j), quiet(dir.path())), kExitOk);
  EXPECT_EQ(cmd_score(dir.path(), "fixture-run", std::string("zero"), quiet(dir.path(), 8)), kExitOk);

  const RunPaths paths(dir.path(), "fixture-run");
  for (auto s : kAllSettings) {
    const auto m = score_matrix_from_csv(
        AttributeKind::races_ethnicities, test::slurp(paths.means("fixture-llm", AttributeKind::races_ethnicities, s)),
        test::slurp(paths.counts("fixture-llm", AttributeKind::races_ethnicities, s)));
    EXPECT_EQ(m.cells.size(), 12u);
    for (const auto& [_, cell] : m.cells) EXPECT_EQ(cell.mean, 0.0);
  }
  for (const auto& [combo, cell] : grid_cells(paths.grid())) EXPECT_EQ(cell, "NA;NA;12") << combo;
  const auto report = test::slurp(paths.report());
  EXPECT_NE(report.find("DegenerateInputError"), std::string::npos);
  EXPECT_NE(report.find("`zero`"), std::string::npos);
  EXPECT_THROW(cmd_score(dir.path(), "fixture-run", std::string("nope"), quiet(dir.path())), ConfigError);
}

TEST(CmdScore, MissingTranscriptNamesPath) {
  test::TempDir dir;
  const auto config = test::make_config(test::fixture_config_json());
  EXPECT_EQ(cmd_run(config, quiet(dir.path())), kExitOk);
  const RunPaths paths(dir.path(), "fixture-run");
  fs::remove(paths.transcript("fixture-llm"));
  try {
    cmd_score(dir.path(), "fixture-run", std::nullopt, quiet(dir.path()));
    FAIL() << "expected MissingTranscriptError";
  } catch (const MissingTranscriptError& e) {
    EXPECT_NE(std::string(e.what()).find(paths.transcript("fixture-llm").string()), std::string::npos);
  }
  EXPECT_THROW(cmd_score(dir.path(), "no-such-run", std::nullopt, quiet(dir.path())), ConfigError);
  EXPECT_THROW(cmd_report(dir.path(), "no-such-run", quiet(dir.path())), ConfigError);
}

TEST(CmdReport, EmptyRunHasNoDataSections) {
  test::TempDir dir;
  test::spit(dir / "ref.csv", "from\\to,AS\nAS,\n");
  nlohmann::json j = test::fixture_config_json("empty");
  j["attributes"] = {{"races_ethnicities",
                      {{"reference", (dir / "ref.csv").string()}, {"roster", {{{"code", "AS"}, {"base_surface", "Asian"}}}}}}};
  EXPECT_EQ(cmd_run(test::make_config(j), quiet(dir / "out")), kExitOk);
  const RunPaths paths(dir / "out", "empty");
  const auto report = test::slurp(paths.report());
  EXPECT_NE(report.find("No data"), std::string::npos);
  EXPECT_EQ(grid_cells(paths.grid()).at("fixture-llm races_ethnicities/mixed"), "NA;NA;0");
  EXPECT_EQ(cmd_report(dir / "out", "empty", quiet(dir / "out")), kExitOk);
}

TEST(CmdRun, RefusalsDroppedOnlyWhenAsked) {
  test::TempDir dir;
  auto j = test::fixture_config_json("refusals");
  j["attributes"] = {{"races_ethnicities", j["attributes"]["races_ethnicities"]}};
  j["settings"] = {"yes_no_only"};
  j["backends"][0]["fixture"] = (dir / "fixture.jsonl").string();
  const auto config = test::make_config(j);
  test::write_replay_fixture(dir / "fixture.jsonl", config, "fixture-llm", [](const Prompt& p) -> std::string {
    if (p.repeat_index == 3) return "I'm sorry, but I cannot answer that.";
    return p.from.code < p.to.code ? "They are great friends." : "They are brutal rivals.";
  });

  EXPECT_EQ(cmd_run(config, quiet(dir / "keep")), kExitOk);
  j["drop_refusals"] = true;
  EXPECT_EQ(cmd_run(test::make_config(j), quiet(dir / "drop")), kExitOk);

  const auto load = [&](const fs::path& out) {
    const RunPaths paths(out, "refusals");
    return score_matrix_from_csv(
        AttributeKind::races_ethnicities,
        test::slurp(paths.means("fixture-llm", AttributeKind::races_ethnicities, QuestionTypeSetting::yes_no_only)),
        test::slurp(paths.counts("fixture-llm", AttributeKind::races_ethnicities, QuestionTypeSetting::yes_no_only)));
  };
  for (const auto& [_, cell] : load(dir / "keep").cells) EXPECT_EQ(cell.count, 18u);
  for (const auto& [_, cell] : load(dir / "drop").cells) EXPECT_EQ(cell.count, 12u);
}

TEST(CmdRun, ReplayGapsMakeAPartialRun) {
  test::TempDir dir;
  auto j = test::fixture_config_json("gaps");
  j["attributes"] = {{"races_ethnicities", j["attributes"]["races_ethnicities"]}};
  j["settings"] = {"yes_no_only"};
  j["backends"][0]["fixture"] = (dir / "fixture.jsonl").string();
  j["max_failure_fraction"] = 1.0;
  auto config = test::make_config(j);
  test::write_replay_fixture(dir / "fixture.jsonl", config, "fixture-llm",
                             [](const Prompt& p) { return "They are great " + p.template_id + "."; });
  // Drop the first record.
  std::string text = test::slurp(dir / "fixture.jsonl");
  const auto dropped = nlohmann::json::parse(text.substr(0, text.find('\n')));
  const std::string from = dropped["from_code"], to = dropped["to_code"];
  text.erase(0, text.find('\n') + 1);
  test::spit(dir / "fixture.jsonl", text);

  EXPECT_EQ(cmd_run(config, quiet(dir / "out")), kExitPartial);
  const RunPaths paths(dir / "out", "gaps");
  EXPECT_TRUE(fs::exists(paths.partial_marker()));
  EXPECT_NE(test::slurp(paths.partial_marker()).find("ReplayMissError"), std::string::npos);
  const auto m = score_matrix_from_csv(
      AttributeKind::races_ethnicities,
      test::slurp(paths.means("fixture-llm", AttributeKind::races_ethnicities, QuestionTypeSetting::yes_no_only)),
      test::slurp(paths.counts("fixture-llm", AttributeKind::races_ethnicities, QuestionTypeSetting::yes_no_only)));
  EXPECT_EQ(m.cell(from, to)->count, 17u);
  EXPECT_EQ(m.cell(to, from)->count, 18u);
  EXPECT_TRUE(fs::exists(paths.grid()));

  // Without a failure allowance the backend aborts but the run still reports.
  j["run_id"] = "gaps-strict";
  j["max_failure_fraction"] = 0.0;
  EXPECT_EQ(cmd_run(test::make_config(j), quiet(dir / "out")), kExitPartial);
  EXPECT_NE(test::slurp(RunPaths(dir / "out", "gaps-strict").partial_marker()).find("RunAbortedError"),
            std::string::npos);
}

TEST(CmdRun, ArtifactsCarryRunIdAndChecksum) {
  test::TempDir dir;
  const auto config = test::make_config(test::fixture_config_json());
  EXPECT_EQ(cmd_run(config, quiet(dir.path())), kExitOk);
  const RunPaths paths(dir.path(), "fixture-run");
  const std::string checksum = nlohmann::json::parse(test::slurp(paths.manifest()))["lexicon_checksum"];
  EXPECT_EQ(checksum.size(), 64u);
  for (const auto& [name, content] : artifacts(paths.root)) {
    EXPECT_NE(content.find("fixture-run"), std::string::npos) << name;
    EXPECT_NE(content.find(checksum), std::string::npos) << name;
  }
  const auto manifest = nlohmann::json::parse(test::slurp(paths.manifest()));
  EXPECT_EQ(manifest["template_set_hash"], template_set_hash(config));
  EXPECT_EQ(manifest["tool_version"], std::string(kToolVersion));
  EXPECT_TRUE(manifest.contains("config"));
}

TEST(CmdRun, LockedOutputDirectory) {
  test::TempDir dir;
  const int fd = ::open((dir / ".lock").c_str(), O_CREAT | O_RDWR, 0644);
  ASSERT_GE(fd, 0);
  ASSERT_EQ(::flock(fd, LOCK_EX), 0);
  EXPECT_THROW(cmd_run(test::make_config(test::fixture_config_json()), quiet(dir.path())), Error);
  ::close(fd);
  EXPECT_EQ(cmd_run(test::make_config(test::fixture_config_json()), quiet(dir.path())), kExitOk);
}

TEST(GridCell, Formatting) {
  CorrelationReport r;
  r.n = 42;
  r.rho = 0.372;
  r.p_value = 0.01541;
  EXPECT_EQ(format_grid_cell(r), "0.3720;0.01541;42");
  r.error = "DegenerateInputError";
  EXPECT_EQ(format_grid_cell(r), "NA;NA;42");
}
