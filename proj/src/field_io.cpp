// SPDX-License-Identifier: Apache-2.0
#include "field_io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "csv.hpp"
#include "error.hpp"

namespace geotomo {

namespace csv {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_double(std::string_view token, std::string_view what) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size() || token.empty())
    throw Error(ErrorCode::Format, "cannot parse " + std::string(what) + " from '" +
                                       std::string(token) + "'");
  return v;
}

long long parse_int(std::string_view token, std::string_view what) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size() || token.empty())
    throw Error(ErrorCode::Format, "cannot parse " + std::string(what) + " from '" +
                                       std::string(token) + "'");
  return v;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
  return out;
}

std::string_view trim_eol(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

}  // namespace csv

void write_field_csv(const ScalarField& field, std::ostream& out) {
  const GridSpec& g = field.spec();
  const int q = g.half_resolution();
  out << csv::format_double(g.step()) << ',' << q << '\n';
  for (int i = -q; i <= q; ++i)
    for (int j = -q; j <= q; ++j)
      out << i << ',' << j << ',' << csv::format_double(field.at(i, j)) << '\n';
  if (!out) throw Error(ErrorCode::Io, "failed writing field CSV");
}

void write_field_csv(const ScalarField& field, const std::filesystem::path& path) {
  auto out = csv::open_output(path);
  write_field_csv(field, out);
}

ScalarField read_field_csv(std::istream& in, bool require_positive) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::Format, "field CSV: missing header");
  auto header = csv::split(csv::trim_eol(line));
  if (header.size() != 2) throw Error(ErrorCode::Format, "field CSV: header must be 'h,Q'");
  const double h = csv::parse_double(header[0], "h");
  const long long q = csv::parse_int(header[1], "Q");
  if (q < 1 || q > 100000) throw Error(ErrorCode::Format, "field CSV: Q out of range");
  if (!(std::abs(h * static_cast<double>(q) - 1.0) <= 1e-12))
    throw Error(ErrorCode::Format, "field CSV: h*Q must equal 1");

  GridSpec grid(static_cast<int>(q));
  std::vector<double> values(grid.node_count());
  const int iq = static_cast<int>(q);
  std::size_t row = 0;
  for (int i = -iq; i <= iq; ++i) {
    for (int j = -iq; j <= iq; ++j, ++row) {
      if (!std::getline(in, line))
        throw Error(ErrorCode::Format, "field CSV: missing node row for (" + std::to_string(i) +
                                           "," + std::to_string(j) + ")");
      auto cols = csv::split(csv::trim_eol(line));
      if (cols.size() != 3) throw Error(ErrorCode::Format, "field CSV: expected 'i,j,value'");
      if (csv::parse_int(cols[0], "i") != i || csv::parse_int(cols[1], "j") != j)
        throw Error(ErrorCode::Format, "field CSV: node rows out of order at line " +
                                           std::to_string(row + 2));
      values[grid.index(i, j)] = csv::parse_double(cols[2], "value");
    }
  }
  while (std::getline(in, line))
    if (!csv::trim_eol(line).empty())
      throw Error(ErrorCode::Format, "field CSV: trailing data after last node");
  return ScalarField(grid, std::move(values), require_positive);
}

ScalarField read_field_csv(const std::filesystem::path& path, bool require_positive) {
  auto in = csv::open_input(path);
  return read_field_csv(in, require_positive);
}

}  // namespace geotomo
