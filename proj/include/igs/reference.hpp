#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "igs/groups.hpp"

namespace igs {

enum class PollUnit {
  percent_positive,   // nationalities: share choosing a favorable option, [0, 100]
  net_favorability,   // religions: %favorable - %unfavorable, [-100, 100]
  mean_thermometer,   // races/ethnicities: mean 0-100 feeling thermometer
};

std::string_view to_string(PollUnit unit);
PollUnit unit_for(AttributeKind kind);
std::pair<double, double> unit_range(PollUnit unit);

using CellKey = std::pair<std::string, std::string>;  // (from, to)

struct ReferenceMatrix {
  AttributeKind attribute = AttributeKind::nationalities;
  PollUnit unit = PollUnit::percent_positive;
  std::string source;
  std::vector<std::string> rows;  // file order
  std::vector<std::string> cols;
  std::map<CellKey, double> cells;

  std::optional<double> cell(const std::string& from, const std::string& to) const;
  friend bool operator==(const ReferenceMatrix&, const ReferenceMatrix&) = default;
};

// Parses a reference CSV and validates it against the roster: every row and
// column code must be a roster group and every value must lie in the unit's
// range. A "# source: ..." comment fills in the citation.
// Throws SchemaError, RangeError, UnknownGroupError.
ReferenceMatrix parse_reference(AttributeKind kind, std::string_view csv_text, const Roster& roster);
ReferenceMatrix load_reference(AttributeKind kind, const std::filesystem::path& path,
                               const Roster& roster);

std::string reference_to_csv(const ReferenceMatrix& matrix);
void save_reference(const ReferenceMatrix& matrix, const std::filesystem::path& path);

struct CoverageReport {
  std::vector<CellKey> missing;     // expected pair with no value
  std::vector<CellKey> unexpected;  // value for a self pair or an object-only source

  bool complete() const { return missing.empty() && unexpected.empty(); }
};

// Compares present cells to enumerate_pairs(roster).
CoverageReport validate_coverage(const ReferenceMatrix& reference, const Roster& roster);

}  // namespace igs
