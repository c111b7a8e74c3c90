#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "igs/aggregate.hpp"
#include "igs/config.hpp"

namespace igs {

inline constexpr std::string_view kToolVersion = "0.3.0";

enum ExitCode : int { kExitOk = 0, kExitPartial = 1, kExitConfig = 2 };

// <outdir>/<run_id>/{manifest.json, transcripts/, matrices/, grid.csv, report.md}
struct RunPaths {
  std::filesystem::path root;

  RunPaths(const std::filesystem::path& outdir, const std::string& run_id) : root(outdir / run_id) {}

  std::filesystem::path manifest() const { return root / "manifest.json"; }
  std::filesystem::path transcripts_dir() const { return root / "transcripts"; }
  std::filesystem::path transcript(const std::string& backend_id) const {
    return transcripts_dir() / (backend_id + ".jsonl");
  }
  std::filesystem::path matrices_dir() const { return root / "matrices"; }
  // <backend>__<attribute>__<setting>.csv holds means, .counts.csv the counts.
  std::filesystem::path means(const std::string& backend_id, AttributeKind a, QuestionTypeSetting s) const;
  std::filesystem::path counts(const std::string& backend_id, AttributeKind a, QuestionTypeSetting s) const;
  std::filesystem::path grid() const { return root / "grid.csv"; }
  std::filesystem::path report() const { return root / "report.md"; }
  std::filesystem::path partial_marker() const { return root / "PARTIAL"; }
};

struct RunOptions {
  std::optional<std::filesystem::path> outdir;  // overrides the config's output_dir
  std::optional<std::size_t> parallelism;
  std::ostream* log = nullptr;  // progress and warnings
};

// plan -> gateway -> transcripts, then score, then report. Returns kExitOk,
// or kExitPartial after writing the PARTIAL marker. Re-running an existing
// run_id resumes it from the stored transcripts; a different configuration
// under the same run_id is a ConfigError.
int cmd_run(const RunConfig& config, const RunOptions& options = {});

// Re-scores stored transcripts with the named analyzer (default: the run's
// configured analyzer) and regenerates matrices, grid and report. No network
// access. Throws MissingTranscriptError if a backend's transcript is absent.
int cmd_score(const std::filesystem::path& outdir, const std::string& run_id,
              const std::optional<std::string>& analyzer_id, const RunOptions& options = {});

// Rebuilds grid.csv and report.md from the stored matrices and references.
int cmd_report(const std::filesystem::path& outdir, const std::string& run_id, const RunOptions& options = {});

// The configuration recorded in a run's manifest.
RunConfig load_run_config(const std::filesystem::path& outdir, const std::string& run_id);

// "rho;p;n" with rho to 4 decimals and p to 4 significant digits, or
// "NA;NA;n" when the correlation is undefined.
std::string format_grid_cell(const CorrelationReport& report);

// SHA-256 over the templates in use and the mixed-setting rows.
std::string template_set_hash(const RunConfig& config);

}  // namespace igs
