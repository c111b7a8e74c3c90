#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "igs/groups.hpp"
#include "igs/prompts.hpp"
#include "igs/reference.hpp"

namespace igs {

struct ScoredResponse {
  std::string from_code;
  std::string to_code;
  double compound = 0.0;
};

struct PairCell {
  double mean = 0.0;
  std::size_t count = 0;
  friend bool operator==(const PairCell&, const PairCell&) = default;
};

// From x to matrix of mean compound scores. Self pairs, object-only sources
// and pairs without any scored response are absent.
struct PairScoreMatrix {
  AttributeKind attribute = AttributeKind::nationalities;
  std::vector<std::string> rows;  // eligible from-codes, roster order
  std::vector<std::string> cols;  // all to-codes, roster order
  std::map<CellKey, PairCell> cells;

  const PairCell* cell(const std::string& from, const std::string& to) const;
  friend bool operator==(const PairScoreMatrix&, const PairScoreMatrix&) = default;
};

// Per-pair arithmetic mean. The result does not depend on record order
// (values are summed in sorted order).
PairScoreMatrix aggregate(AttributeKind kind, const Roster& roster,
                          std::span<const ScoredResponse> records);

std::string score_means_to_csv(const PairScoreMatrix& m, const std::vector<std::string>& comments = {});
std::string score_counts_to_csv(const PairScoreMatrix& m, const std::vector<std::string>& comments = {});
// Rebuilds a matrix from its means and counts CSVs. Throws SchemaError.
PairScoreMatrix score_matrix_from_csv(AttributeKind kind, std::string_view means_csv,
                                      std::string_view counts_csv);

struct SkippedCell {
  CellKey cell;
  std::string reason;  // "missing in scores" or "missing in reference"
};

struct AlignedPairs {
  std::vector<double> scores;     // x
  std::vector<double> reference;  // y
  std::vector<CellKey> cells;
  std::vector<SkippedCell> skipped;
};

// Pairs cells present in both matrices, from-major in score-matrix order.
// Throws InsufficientOverlapError below 3 shared cells, DomainError on an
// attribute mismatch.
AlignedPairs align(const PairScoreMatrix& scores, const ReferenceMatrix& reference);

struct CorrelationReport {
  std::string backend_id;
  QuestionTypeSetting setting = QuestionTypeSetting::yes_no_only;
  AttributeKind attribute = AttributeKind::nationalities;
  std::size_t n = 0;
  std::optional<double> rho;
  std::optional<double> p_value;
  // Empty on success, otherwise the error class ("DegenerateInputError", ...).
  std::string error;
  std::string error_detail;

  bool ok() const { return error.empty(); }
};

struct ScoreRun {
  std::string backend_id;
  QuestionTypeSetting setting = QuestionTypeSetting::yes_no_only;
  PairScoreMatrix scores;
};

// One report per run, in input order. Failures are embedded per cell.
std::vector<CorrelationReport> correlation_grid(std::span<const ScoreRun> runs,
                                                const std::map<AttributeKind, ReferenceMatrix>& references);

}  // namespace igs
