#include <CLI11.hpp>

#include <iostream>

#include "igs/config.hpp"
#include "igs/error.hpp"
#include "igs/pipeline.hpp"

namespace {

int validate_config(const std::string& path) {
  const igs::RunConfig config = igs::load_config(path);
  const auto check = igs::check_config_inputs(config);
  for (const auto& w : check.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& e : check.errors) std::cerr << "error: " << e << '\n';
  if (!check.errors.empty()) return igs::kExitConfig;
  std::size_t prompts = 0;
  const auto catalog = config.catalog();
  for (const auto& a : config.attributes) {
    for (auto s : config.settings) prompts += igs::build_plan(a.kind, a.roster, s, config.repeats, catalog).size();
  }
  std::cout << "config ok: run " << config.run_id << ", " << config.backends.size() << " backend(s), "
            << config.attributes.size() << " attribute(s), " << config.settings.size() << " setting(s), "
            << prompts << " prompts per backend\n";
  return igs::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inter-group sentiment extraction and poll validation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(igs::kToolVersion));

  std::string config_path, run_id, outdir = "runs";
  std::optional<std::string> analyzer;
  std::size_t parallelism = 0;
  bool quiet = false;

  auto* run = app.add_subcommand("run", "query every backend, then score and report");
  run->add_option("--config", config_path, "run configuration (JSON)")->required();
  run->add_option("--outdir", outdir, "output directory (default: the config's output_dir)");
  run->add_option("--parallelism", parallelism, "in-flight requests per backend")->check(CLI::Range(1, 1024));

  auto* score = app.add_subcommand("score", "re-score stored transcripts without network access");
  score->add_option("--run", run_id, "run id")->required();
  score->add_option("--analyzer", analyzer, "analyzer id from the run configuration");
  score->add_option("--outdir", outdir, "output directory")->capture_default_str();
  score->add_option("--parallelism", parallelism, "scoring workers")->check(CLI::Range(1, 1024));

  auto* report = app.add_subcommand("report", "rebuild grid.csv and report.md");
  report->add_option("--run", run_id, "run id")->required();
  report->add_option("--outdir", outdir, "output directory")->capture_default_str();

  auto* validate = app.add_subcommand("validate-config", "check a configuration and its inputs");
  validate->add_option("--config", config_path, "run configuration (JSON)")->required();

  for (auto* sub : {run, score, report}) sub->add_flag("-q,--quiet", quiet, "suppress progress output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : igs::kExitConfig;
  }

  igs::RunOptions options;
  options.log = quiet ? nullptr : &std::cerr;
  if (parallelism > 0) options.parallelism = parallelism;

  try {
    if (*validate) return validate_config(config_path);
    if (*run) {
      const igs::RunConfig config = igs::load_config(config_path);
      if (run->count("--outdir") > 0) options.outdir = outdir;
      return igs::cmd_run(config, options);
    }
    if (*score) return igs::cmd_score(outdir, run_id, analyzer, options);
    if (*report) return igs::cmd_report(outdir, run_id, options);
  } catch (const igs::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return igs::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return igs::kExitPartial;
  }
  return igs::kExitConfig;
}
