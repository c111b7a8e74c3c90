#include "igs/matrix_csv.hpp"

#include <charconv>
#include <set>

#include "igs/error.hpp"

namespace igs {

std::string format_decimal(double value) {
  char buf[512];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed);
  if (ec != std::errc{}) throw std::runtime_error("format_decimal: value does not fit");
  std::string out(buf, ptr);
  if (out == "-0") out = "0";
  return out;
}

std::optional<double> parse_decimal(std::string_view text) {
  std::size_t i = 0;
  if (i < text.size() && text[i] == '-') ++i;
  const std::size_t int_start = i;
  while (i < text.size() && text[i] >= '0' && text[i] <= '9') ++i;
  if (i == int_start) return std::nullopt;
  if (i < text.size() && text[i] == '.') {
    ++i;
    const std::size_t frac_start = i;
    while (i < text.size() && text[i] >= '0' && text[i] <= '9') ++i;
    if (i == frac_start) return std::nullopt;
  }
  if (i != text.size()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return v;
}

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return std::string(s);
}

}  // namespace

MatrixCsv parse_matrix_csv(std::string_view text) {
  MatrixCsv csv;
  bool have_header = false;
  std::size_t line_no = 0;
  std::set<std::string> row_codes;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line.front() == '#') {
      csv.comments.push_back(trim(line.substr(1)));
      continue;
    }
    const auto fields = split_commas(line);
    const std::string where = "line " + std::to_string(line_no);
    if (!have_header) {
      if (fields.front() != kCornerCell) {
        throw SchemaError(where + ": header must start with \"from\\to\"");
      }
      std::set<std::string> seen;
      for (std::size_t i = 1; i < fields.size(); ++i) {
        std::string code = trim(fields[i]);
        if (code.empty()) throw SchemaError(where + ": empty column code");
        if (!seen.insert(code).second) throw SchemaError(where + ": duplicate column " + code);
        csv.cols.push_back(std::move(code));
      }
      if (csv.cols.empty()) throw SchemaError(where + ": header has no columns");
      have_header = true;
      continue;
    }
    if (fields.size() != csv.cols.size() + 1) {
      throw SchemaError(where + ": expected " + std::to_string(csv.cols.size() + 1) + " fields, got " +
                        std::to_string(fields.size()));
    }
    std::string code = trim(fields.front());
    if (code.empty()) throw SchemaError(where + ": empty row code");
    if (!row_codes.insert(code).second) throw SchemaError(where + ": duplicate row " + code);
    std::vector<std::optional<double>> row;
    for (std::size_t i = 1; i < fields.size(); ++i) {
      const std::string cell = trim(fields[i]);
      if (cell.empty()) {
        row.emplace_back();
        continue;
      }
      const auto v = parse_decimal(cell);
      if (!v) throw SchemaError(where + ": \"" + cell + "\" is not a plain decimal number");
      row.emplace_back(*v);
    }
    csv.rows.push_back(std::move(code));
    csv.cells.push_back(std::move(row));
  }
  if (!have_header) throw SchemaError("matrix CSV has no header row");
  return csv;
}

std::string write_matrix_csv(const MatrixCsv& csv) {
  std::string out;
  for (const auto& c : csv.comments) out += "# " + c + "\n";
  out += kCornerCell;
  for (const auto& c : csv.cols) out += "," + c;
  out += "\n";
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    out += csv.rows[r];
    for (std::size_t c = 0; c < csv.cols.size(); ++c) {
      out += ",";
      if (r < csv.cells.size() && c < csv.cells[r].size() && csv.cells[r][c]) {
        out += format_decimal(*csv.cells[r][c]);
      }
    }
    out += "\n";
  }
  return out;
}

}  // namespace igs
