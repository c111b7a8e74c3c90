#include "igs/aggregate.hpp"

#include <algorithm>

#include "igs/error.hpp"
#include "igs/matrix_csv.hpp"
#include "igs/stats.hpp"

namespace igs {

const PairCell* PairScoreMatrix::cell(const std::string& from, const std::string& to) const {
  const auto it = cells.find({from, to});
  return it == cells.end() ? nullptr : &it->second;
}

PairScoreMatrix aggregate(AttributeKind kind, const Roster& roster,
                          std::span<const ScoredResponse> records) {
  PairScoreMatrix m;
  m.attribute = kind;
  for (const auto& g : roster) {
    if (g.can_be_from) m.rows.push_back(g.code);
    m.cols.push_back(g.code);
  }
  std::map<CellKey, std::vector<double>> values;
  for (const auto& r : records) {
    const Group* from = find_group(roster, r.from_code);
    const Group* to = find_group(roster, r.to_code);
    if (!from || !to || !from->can_be_from || r.from_code == r.to_code) continue;
    values[{r.from_code, r.to_code}].push_back(r.compound);
  }
  for (auto& [key, v] : values) {
    std::sort(v.begin(), v.end());
    double sum = 0.0;
    for (double x : v) sum += x;
    const double mean = std::clamp(sum / static_cast<double>(v.size()), -1.0, 1.0);
    m.cells.emplace(key, PairCell{mean, v.size()});
  }
  return m;
}

namespace {

template <typename Fn>
std::string matrix_to_csv(const PairScoreMatrix& m, const std::vector<std::string>& comments, Fn value) {
  MatrixCsv csv;
  csv.comments = comments;
  csv.rows = m.rows;
  csv.cols = m.cols;
  for (const auto& r : m.rows) {
    auto& row = csv.cells.emplace_back();
    for (const auto& c : m.cols) {
      const PairCell* cell = m.cell(r, c);
      row.push_back(cell ? std::optional<double>(value(*cell)) : std::nullopt);
    }
  }
  return write_matrix_csv(csv);
}

}  // namespace

std::string score_means_to_csv(const PairScoreMatrix& m, const std::vector<std::string>& comments) {
  return matrix_to_csv(m, comments, [](const PairCell& c) { return c.mean; });
}

std::string score_counts_to_csv(const PairScoreMatrix& m, const std::vector<std::string>& comments) {
  return matrix_to_csv(m, comments, [](const PairCell& c) { return static_cast<double>(c.count); });
}

PairScoreMatrix score_matrix_from_csv(AttributeKind kind, std::string_view means_csv,
                                      std::string_view counts_csv) {
  const MatrixCsv means = parse_matrix_csv(means_csv);
  const MatrixCsv counts = parse_matrix_csv(counts_csv);
  if (means.rows != counts.rows || means.cols != counts.cols) {
    throw SchemaError("score means and counts matrices have different shapes");
  }
  PairScoreMatrix m;
  m.attribute = kind;
  m.rows = means.rows;
  m.cols = means.cols;
  for (std::size_t r = 0; r < m.rows.size(); ++r) {
    for (std::size_t c = 0; c < m.cols.size(); ++c) {
      const auto& mean = means.cells[r][c];
      const auto& count = counts.cells[r][c];
      if (mean.has_value() != count.has_value()) {
        throw SchemaError("score cell " + m.rows[r] + "->" + m.cols[c] + " has a mean or a count but not both");
      }
      if (!mean) continue;
      if (*count < 1 || *count != static_cast<double>(static_cast<std::size_t>(*count))) {
        throw SchemaError("score cell " + m.rows[r] + "->" + m.cols[c] + " has an invalid count");
      }
      m.cells.emplace(CellKey{m.rows[r], m.cols[c]}, PairCell{*mean, static_cast<std::size_t>(*count)});
    }
  }
  return m;
}

namespace {

AlignedPairs align_cells(const PairScoreMatrix& scores, const ReferenceMatrix& reference) {
  if (scores.attribute != reference.attribute) {
    throw DomainError("align: score matrix is " + std::string(to_string(scores.attribute)) +
                      " but reference is " + std::string(to_string(reference.attribute)));
  }
  AlignedPairs out;
  for (const auto& r : scores.rows) {
    for (const auto& c : scores.cols) {
      const PairCell* cell = scores.cell(r, c);
      if (!cell) continue;
      if (const auto ref = reference.cell(r, c)) {
        out.scores.push_back(cell->mean);
        out.reference.push_back(*ref);
        out.cells.emplace_back(r, c);
      } else {
        out.skipped.push_back({{r, c}, "missing in reference"});
      }
    }
  }
  for (const auto& r : reference.rows) {
    for (const auto& c : reference.cols) {
      if (r == c || !reference.cells.contains({r, c})) continue;
      if (!scores.cell(r, c)) out.skipped.push_back({{r, c}, "missing in scores"});
    }
  }
  return out;
}

}  // namespace

AlignedPairs align(const PairScoreMatrix& scores, const ReferenceMatrix& reference) {
  AlignedPairs out = align_cells(scores, reference);
  if (out.cells.size() < 3) {
    throw InsufficientOverlapError("only " + std::to_string(out.cells.size()) +
                                   " cells are present in both the score and reference matrices");
  }
  return out;
}

std::vector<CorrelationReport> correlation_grid(std::span<const ScoreRun> runs,
                                                const std::map<AttributeKind, ReferenceMatrix>& references) {
  std::vector<CorrelationReport> grid;
  grid.reserve(runs.size());
  for (const auto& run : runs) {
    CorrelationReport rep;
    rep.backend_id = run.backend_id;
    rep.setting = run.setting;
    rep.attribute = run.scores.attribute;
    const auto fail = [&](std::string kind, std::string detail) {
      rep.error = std::move(kind);
      rep.error_detail = std::move(detail);
    };
    const auto ref = references.find(run.scores.attribute);
    if (ref == references.end()) {
      fail("MissingReferenceError", "no reference matrix for " + std::string(to_string(rep.attribute)));
      grid.push_back(std::move(rep));
      continue;
    }
    try {
      rep.n = align_cells(run.scores, ref->second).cells.size();
      const AlignedPairs pairs = align(run.scores, ref->second);
      const double rho = pearson(pairs.scores, pairs.reference);
      rep.rho = rho;
      rep.p_value = noncorrelation_p(rho, rep.n);
    } catch (const InsufficientOverlapError& e) {
      fail("InsufficientOverlapError", e.what());
    } catch (const DegenerateInputError& e) {
      fail("DegenerateInputError", e.what());
    } catch (const Error& e) {
      fail("DomainError", e.what());
    }
    if (!rep.ok()) {
      rep.rho.reset();
      rep.p_value.reset();
    }
    grid.push_back(std::move(rep));
  }
  return grid;
}

}  // namespace igs
