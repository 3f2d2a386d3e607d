// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "csv.hpp"
#include "error.hpp"
#include "transform.hpp"

namespace geotomo {

namespace {
constexpr const char* kSinogramHeader = "i,j,x1,x2,xi1,xi2,tof,valid";
constexpr const char* kTraceHeader = "ray_id,t,x1,x2,xi1,xi2,z";
}  // namespace

void write_sinogram_csv(const Sinogram& sino, std::ostream& out) {
  using csv::format_double;
  out << kSinogramHeader << '\n';
  for (std::size_t k = 0; k < sino.size(); ++k) {
    const RayEntry& e = (*sino.rays)[k];
    out << e.i << ',' << e.j << ',' << format_double(e.source.x) << ','
        << format_double(e.source.y) << ',' << format_double(e.direction.x) << ','
        << format_double(e.direction.y) << ',' << format_double(sino.tof[k]) << ','
        << (sino.valid[k] ? 1 : 0) << '\n';
  }
  if (!out) throw Error(ErrorCode::Io, "failed writing sinogram CSV");
}

void write_sinogram_csv(const Sinogram& sino, const std::filesystem::path& path) {
  auto out = csv::open_output(path);
  write_sinogram_csv(sino, out);
}

Sinogram read_sinogram_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || csv::trim_eol(line) != kSinogramHeader)
    throw Error(ErrorCode::Format, std::string("sinogram CSV: header must be '") +
                                       kSinogramHeader + "'");
  struct Row {
    long long i, j;
    double x1, x2, xi1, xi2, tof;
    bool valid;
  };
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    auto view = csv::trim_eol(line);
    if (view.empty()) continue;
    auto c = csv::split(view);
    if (c.size() != 8)
      throw Error(ErrorCode::Format, "sinogram CSV: expected 8 columns in row " +
                                         std::to_string(rows.size() + 2));
    const long long valid = csv::parse_int(c[7], "valid");
    if (valid != 0 && valid != 1) throw Error(ErrorCode::Format, "sinogram CSV: valid must be 0/1");
    rows.push_back({csv::parse_int(c[0], "i"), csv::parse_int(c[1], "j"),
                    csv::parse_double(c[2], "x1"), csv::parse_double(c[3], "x2"),
                    csv::parse_double(c[4], "xi1"), csv::parse_double(c[5], "xi2"),
                    csv::parse_double(c[6], "tof"), valid == 1});
  }
  if (rows.empty()) throw Error(ErrorCode::Format, "sinogram CSV: no rays");
  const long long nx = rows.back().i, nxi = rows.back().j;
  if (nx < 4 || nxi < 4 || static_cast<long long>(rows.size()) != nx * nxi)
    throw Error(ErrorCode::Format, "sinogram CSV: row count does not form an N_x by N_xi grid");

  auto rays = std::make_shared<const RaySet>(static_cast<int>(nx), static_cast<int>(nxi));
  Sinogram s = Sinogram::zeros(rays, SinogramKind::Exact);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const Row& r = rows[k];
    const RayEntry& e = (*rays)[k];
    if (r.i != e.i || r.j != e.j)
      throw Error(ErrorCode::Format, "sinogram CSV: rays out of order at row " +
                                         std::to_string(k + 2));
    const double geom_err = std::max({std::abs(r.x1 - e.source.x), std::abs(r.x2 - e.source.y),
                                      std::abs(r.xi1 - e.direction.x),
                                      std::abs(r.xi2 - e.direction.y)});
    if (!(geom_err <= 1e-12))
      throw Error(ErrorCode::Format, "sinogram CSV: ray geometry mismatch at row " +
                                         std::to_string(k + 2));
    if (!std::isfinite(r.tof))
      throw Error(ErrorCode::NonFinite, "sinogram CSV: non-finite tof at row " +
                                            std::to_string(k + 2));
    if (r.valid && !e.inward)
      throw Error(ErrorCode::Format, "sinogram CSV: non-inward ray marked valid at row " +
                                         std::to_string(k + 2));
    if (!r.valid && r.tof != 0.0)
      throw Error(ErrorCode::Format, "sinogram CSV: invalid ray with nonzero tof at row " +
                                         std::to_string(k + 2));
    s.tof[k] = r.tof;
    s.valid[k] = r.valid ? 1 : 0;
  }
  return s;
}

Sinogram read_sinogram_csv(const std::filesystem::path& path) {
  auto in = csv::open_input(path);
  return read_sinogram_csv(in);
}

void write_traces_csv(const GeodesicSet& geodesics, std::span<const std::size_t> ray_ids,
                      std::ostream& out) {
  using csv::format_double;
  out << kTraceHeader << '\n';
  for (std::size_t id : ray_ids) {
    if (id >= geodesics.traces.size())
      throw Error(ErrorCode::InvalidArgument, "trace id " + std::to_string(id) + " out of range");
    const auto& t = geodesics.traces[id];
    if (!t) continue;
    for (const TraceSample& s : t->samples)
      out << id << ',' << format_double(s.t) << ',' << format_double(s.state.x.x) << ','
          << format_double(s.state.x.y) << ',' << format_double(s.state.xi.x) << ','
          << format_double(s.state.xi.y) << ',' << format_double(s.state.z) << '\n';
  }
  if (!out) throw Error(ErrorCode::Io, "failed writing trace CSV");
}

void write_traces_csv(const GeodesicSet& geodesics, std::span<const std::size_t> ray_ids,
                      const std::filesystem::path& path) {
  auto out = csv::open_output(path);
  write_traces_csv(geodesics, ray_ids, out);
}

}  // namespace geotomo
