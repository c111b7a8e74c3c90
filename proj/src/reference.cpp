#include "igs/reference.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "igs/error.hpp"
#include "igs/matrix_csv.hpp"
#include "igs/prompts.hpp"

namespace igs {

std::string_view to_string(PollUnit unit) {
  switch (unit) {
    case PollUnit::percent_positive: return "percent_positive";
    case PollUnit::net_favorability: return "net_favorability";
    case PollUnit::mean_thermometer: return "mean_thermometer";
  }
  return "unknown";
}

PollUnit unit_for(AttributeKind kind) {
  switch (kind) {
    case AttributeKind::nationalities: return PollUnit::percent_positive;
    case AttributeKind::religions: return PollUnit::net_favorability;
    case AttributeKind::races_ethnicities: return PollUnit::mean_thermometer;
  }
  return PollUnit::percent_positive;
}

std::pair<double, double> unit_range(PollUnit unit) {
  return unit == PollUnit::net_favorability ? std::pair{-100.0, 100.0} : std::pair{0.0, 100.0};
}

std::optional<double> ReferenceMatrix::cell(const std::string& from, const std::string& to) const {
  const auto it = cells.find({from, to});
  if (it == cells.end()) return std::nullopt;
  return it->second;
}

namespace {

constexpr std::string_view kSourcePrefix = "source:";

}  // namespace

ReferenceMatrix parse_reference(AttributeKind kind, std::string_view csv_text, const Roster& roster) {
  const MatrixCsv csv = parse_matrix_csv(csv_text);
  ReferenceMatrix m;
  m.attribute = kind;
  m.unit = unit_for(kind);
  for (const auto& c : csv.comments) {
    if (c.starts_with(kSourcePrefix)) {
      std::string_view s = std::string_view(c).substr(kSourcePrefix.size());
      while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
      m.source = std::string(s);
    }
  }
  for (const auto& code : csv.cols) {
    if (!find_group(roster, code)) {
      throw UnknownGroupError("column " + code + " is not a " + std::string(to_string(kind)) + " group");
    }
  }
  for (const auto& code : csv.rows) {
    if (!find_group(roster, code)) {
      throw UnknownGroupError("row " + code + " is not a " + std::string(to_string(kind)) + " group");
    }
  }
  const auto [lo, hi] = unit_range(m.unit);
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    for (std::size_t c = 0; c < csv.cols.size(); ++c) {
      const auto& v = csv.cells[r][c];
      if (!v) continue;
      if (*v < lo || *v > hi) {
        throw RangeError(csv.rows[r] + "->" + csv.cols[c] + " = " + format_decimal(*v) +
                         " is outside the " + std::string(to_string(m.unit)) + " range [" +
                         format_decimal(lo) + ", " + format_decimal(hi) + "]");
      }
      m.cells[{csv.rows[r], csv.cols[c]}] = *v;
    }
  }
  m.rows = csv.rows;
  m.cols = csv.cols;
  return m;
}

ReferenceMatrix load_reference(AttributeKind kind, const std::filesystem::path& path,
                               const Roster& roster) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot read reference file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_reference(kind, ss.str(), roster);
  } catch (const SchemaError& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

std::string reference_to_csv(const ReferenceMatrix& matrix) {
  MatrixCsv csv;
  csv.comments.push_back("attribute: " + std::string(to_string(matrix.attribute)));
  csv.comments.push_back("unit: " + std::string(to_string(matrix.unit)));
  if (!matrix.source.empty()) csv.comments.push_back(std::string(kSourcePrefix) + " " + matrix.source);
  csv.cols = matrix.cols;
  csv.rows = matrix.rows;
  for (const auto& r : matrix.rows) {
    auto& row = csv.cells.emplace_back();
    for (const auto& c : matrix.cols) row.push_back(matrix.cell(r, c));
  }
  return write_matrix_csv(csv);
}

void save_reference(const ReferenceMatrix& matrix, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw SchemaError("cannot write " + path.string());
  out << reference_to_csv(matrix);
}

CoverageReport validate_coverage(const ReferenceMatrix& reference, const Roster& roster) {
  CoverageReport report;
  std::set<CellKey> expected;
  for (const auto& [from, to] : enumerate_pairs(reference.attribute, roster)) {
    expected.insert({from.code, to.code});
    if (!reference.cells.contains({from.code, to.code})) report.missing.emplace_back(from.code, to.code);
  }
  for (const auto& r : reference.rows) {
    for (const auto& c : reference.cols) {
      if (reference.cells.contains({r, c}) && !expected.contains({r, c})) {
        report.unexpected.emplace_back(r, c);
      }
    }
  }
  return report;
}

}  // namespace igs
