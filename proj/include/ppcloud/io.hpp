// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ppcloud/bad_boxes.hpp"
#include "ppcloud/experiments/csv.hpp"
#include "ppcloud/lattice.hpp"
#include "ppcloud/lattice_field.hpp"
#include "ppcloud/point_process.hpp"
#include "ppcloud/regularity.hpp"

namespace ppcloud::io {

namespace detail {

inline std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline std::string strip(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && s[i] == ' ') ++i;
  return s.substr(i);
}

inline double to_real(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("csv: not a number: '" + s + "'");
  return v;
}

inline std::int64_t to_int(const std::string& s) {
  std::size_t used = 0;
  const long long v = std::stoll(s, &used);
  if (used != s.size()) throw std::invalid_argument("csv: not an integer: '" + s + "'");
  return v;
}

/// Reads a CSV with the exact expected header; returns the data rows.
inline std::vector<std::vector<std::string>> read_table(std::istream& in, const std::vector<std::string>& header) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("csv: missing header");
  auto got = split(strip(line));
  for (auto& g : got) g = strip(g);
  if (got != header) {
    std::string want;
    for (const auto& h : header) want += (want.empty() ? "" : ",") + h;
    throw std::invalid_argument("csv: expected header '" + want + "'");
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    line = strip(line);
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != header.size()) throw std::invalid_argument("csv: wrong number of columns");
    for (auto& c : cells) c = strip(c);
    rows.push_back(std::move(cells));
  }
  return rows;
}

inline std::vector<std::string> coord_header(const char* prefix, int d) {
  std::vector<std::string> h;
  for (int i = 1; i <= d; ++i) h.push_back(prefix + std::to_string(i));
  return h;
}

inline std::string join(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + cells[i];
  return out;
}

}  // namespace detail

// ----------------------------------------------------------------- clouds

/// Header x1..xd, one point per row, 17 significant digits.
template <int D>
void write_cloud(std::ostream& out, const PointCloud<D>& cloud) {
  out << detail::join(detail::coord_header("x", D)) << '\n';
  for (const auto& x : cloud.points()) {
    for (int i = 0; i < D; ++i) out << (i ? "," : "") << format_exact(x[i]);
    out << '\n';
  }
}

template <int D>
std::vector<Point<D>> read_points(std::istream& in) {
  std::vector<Point<D>> pts;
  for (const auto& row : detail::read_table(in, detail::coord_header("x", D))) {
    Point<D> x;
    for (int i = 0; i < D; ++i) x[i] = detail::to_real(row[i]);
    pts.push_back(x);
  }
  return pts;
}

/// Number of columns of a cloud file (its dimension), read from the header.
inline int cloud_dimension(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("csv: missing header");
  const auto cells = detail::split(detail::strip(line));
  const int d = static_cast<int>(cells.size());
  if (d < 1 || d > 3 || detail::split(detail::join(detail::coord_header("x", d))) != cells)
    throw std::invalid_argument("cloud csv: header must be x1[,x2[,x3]]");
  return d;
}

// ------------------------------------------------------------ cloud fields

/// Header `value`, one row per cloud point in cloud order.
inline void write_cloud_values(std::ostream& out, const std::vector<double>& values) {
  out << "value\n";
  for (double v : values) out << format_exact(v) << '\n';
}

inline std::vector<double> read_cloud_values(std::istream& in) {
  std::vector<double> v;
  for (const auto& row : detail::read_table(in, {"value"})) v.push_back(detail::to_real(row[0]));
  return v;
}

// ----------------------------------------------------------- lattice files

/// Header J1..Jd, one box per row, lexicographic order.
template <int D>
void write_partition(std::ostream& out, const LatticePartition<D>& p) {
  out << detail::join(detail::coord_header("J", D)) << '\n';
  for (std::size_t j = 0; j < p.size(); ++j) {
    const auto id = p.box(j);
    for (int i = 0; i < D; ++i) out << (i ? "," : "") << id.coords[i];
    out << '\n';
  }
}

/// Header J1..Jd,value over the field's domain.
template <int D>
void write_lattice_field(std::ostream& out, const LatticeField& v, const LatticePartition<D>& p) {
  auto h = detail::coord_header("J", D);
  h.push_back("value");
  out << detail::join(h) << '\n';
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (!v.defined(j)) continue;
    const auto id = p.box(j);
    for (int i = 0; i < D; ++i) out << id.coords[i] << ',';
    out << format_exact(v[j]) << '\n';
  }
}

template <int D>
std::map<BoxId<D>, double> read_lattice_values(std::istream& in) {
  auto h = detail::coord_header("J", D);
  h.push_back("value");
  std::map<BoxId<D>, double> out;
  for (const auto& row : detail::read_table(in, h)) {
    BoxId<D> id;
    for (int i = 0; i < D; ++i) id.coords[i] = detail::to_int(row[i]);
    if (!out.emplace(id, detail::to_real(row[D])).second) throw std::invalid_argument("lattice csv: duplicate box");
  }
  return out;
}

/// Header J1..Jd,count,is_bad.
template <int D>
void write_classification(std::ostream& out, const Classification& cls, const LatticePartition<D>& p) {
  auto h = detail::coord_header("J", D);
  h.push_back("count");
  h.push_back("is_bad");
  out << detail::join(h) << '\n';
  for (std::size_t j = 0; j < p.size(); ++j) {
    const auto id = p.box(j);
    for (int i = 0; i < D; ++i) out << id.coords[i] << ',';
    out << cls.counts[j] << ',' << (cls.is_bad(j) ? 1 : 0) << '\n';
  }
}

/// Header component_id,size,boundary_size,max_path_len; max_path_len is -1
/// when the component's boundary is not diagonally connected.
template <int D>
void write_components(std::ostream& out, const ComponentGraph& g, const LatticePartition<D>& p) {
  out << "component_id,size,boundary_size,max_path_len\n";
  for (std::size_t c = 0; c < g.count(); ++c) {
    const auto len = max_boundary_path(g, c, p);
    out << c << ',' << g.members[c].size() << ',' << g.boundary[c].size() << ','
        << (len ? static_cast<std::int64_t>(*len) : -1) << '\n';
  }
}

/// Header component_id,J1..Jd: one row per bad box.
template <int D>
void write_component_members(std::ostream& out, const ComponentGraph& g, const LatticePartition<D>& p) {
  auto h = detail::coord_header("J", D);
  h.insert(h.begin(), "component_id");
  out << detail::join(h) << '\n';
  for (std::size_t c = 0; c < g.count(); ++c)
    for (std::size_t j : g.members[c]) {
      out << c;
      for (int i = 0; i < D; ++i) out << ',' << p.box(j).coords[i];
      out << '\n';
    }
}

template <int D>
std::vector<BoxId<D>> read_component_members(std::istream& in) {
  auto h = detail::coord_header("J", D);
  h.insert(h.begin(), "component_id");
  std::vector<BoxId<D>> out;
  for (const auto& row : detail::read_table(in, h)) {
    BoxId<D> id;
    for (int i = 0; i < D; ++i) id.coords[i] = detail::to_int(row[i + 1]);
    out.push_back(id);
  }
  return out;
}

/// The partition whose boxes are exactly the given index set, which must be a
/// full rectangular block of lattice indices.
template <int D>
LatticePartition<D> partition_from_boxes(const std::vector<BoxId<D>>& boxes, double s) {
  if (boxes.empty()) throw std::invalid_argument("partition_from_boxes: no boxes");
  BoxId<D> lo = boxes.front(), hi = boxes.front();
  for (const auto& b : boxes)
    for (int i = 0; i < D; ++i) {
      lo.coords[i] = std::min(lo.coords[i], b.coords[i]);
      hi.coords[i] = std::max(hi.coords[i], b.coords[i]);
    }
  Point<D> rlo, rhi;
  for (int i = 0; i < D; ++i) {
    rlo[i] = (static_cast<double>(lo.coords[i]) - 0.5) * s;
    rhi[i] = (static_cast<double>(hi.coords[i]) + 0.5) * s;
  }
  LatticePartition<D> p(Region<D>(rlo, rhi), s);
  std::vector<char> seen(p.size(), 0);
  for (const auto& b : boxes) {
    const auto j = p.index_of(b);
    if (!j) throw std::invalid_argument("partition_from_boxes: box outside the block");
    seen[*j] = 1;
  }
  for (char c : seen)
    if (!c) throw std::invalid_argument("partition_from_boxes: boxes do not form a rectangular block");
  if (p.size() != boxes.size()) throw std::invalid_argument("partition_from_boxes: duplicate boxes");
  return p;
}

// --------------------------------------------------------------- regularity

/// Header point_index,inradius_est,diam_est,is_regular.
inline void write_regularity(std::ostream& out, const RegularityReport& r) {
  out << "point_index,inradius_est,diam_est,is_regular\n";
  for (std::size_t x = 0; x < r.regular.size(); ++x)
    out << x << ',' << format_exact(r.inradius_est[x]) << ',' << format_exact(r.diam_est[x]) << ','
        << (r.regular[x] ? 1 : 0) << '\n';
}

/// Flat raster dump: labels as little-endian uint32, row-major (last axis fastest).
template <int D>
void write_raster_labels(std::ostream& out, const VoronoiRaster<D>& vr) {
  for (std::uint32_t l : vr.labels) {
    const unsigned char b[4] = {static_cast<unsigned char>(l), static_cast<unsigned char>(l >> 8),
                                static_cast<unsigned char>(l >> 16), static_cast<unsigned char>(l >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
  }
}

inline std::vector<std::uint32_t> read_raster_labels(std::istream& in) {
  std::vector<std::uint32_t> out;
  unsigned char b[4];
  while (in.read(reinterpret_cast<char*>(b), 4))
    out.push_back(static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
                  (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24));
  if (in.gcount() != 0) throw std::invalid_argument("raster dump: trailing bytes");
  return out;
}

}  // namespace ppcloud::io
