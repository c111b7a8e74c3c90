#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace igs {

// Group-by-group matrix CSV shared by reference polls and score matrices:
//
//   # optional comment lines
//   from\to,CN,FR,...
//   CN,,71.5,...
//   FR,44,,...
//
// UTF-8, comma separated, LF line endings. The first header cell is
// literally "from\to". An empty cell is an absent value, distinct from 0.
// Numbers are plain decimals ("-12", "0.25"); no exponents, no thousands
// separators, independent of the process locale.
inline constexpr std::string_view kCornerCell = "from\\to";

struct MatrixCsv {
  std::vector<std::string> comments;  // without the leading '#', trimmed
  std::vector<std::string> cols;
  std::vector<std::string> rows;
  std::vector<std::vector<std::optional<double>>> cells;  // [row][col]
};

// Throws SchemaError on bad header, ragged rows, duplicate codes or
// malformed numbers.
MatrixCsv parse_matrix_csv(std::string_view text);

std::string write_matrix_csv(const MatrixCsv& csv);

// Shortest plain-decimal form that parses back to the same double.
std::string format_decimal(double value);
// Strict inverse of format_decimal; std::nullopt on anything else.
std::optional<double> parse_decimal(std::string_view text);

}  // namespace igs
