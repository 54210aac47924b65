// Copyright 2026 The membrane authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "membrane/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace membrane::io {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);  // "\n" endings everywhere
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open for reading: " + path.string());
  return in;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

void write_vtk(const std::filesystem::path& path, const Mesh& mesh,
               std::span<const double> point_scalar,
               const std::string& scalar_name) {
  std::ofstream out = open_out(path);
  out << "# vtk DataFile Version 3.0\n";
  out << "membrane state\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.n_vertices() << " double\n";
  for (const Vec2& p : mesh.vertices())
    out << format_double(p.x) << ' ' << format_double(p.y) << " 0\n";
  out << "CELLS " << mesh.n_triangles() << ' ' << 4 * mesh.n_triangles() << "\n";
  for (const auto& t : mesh.triangles())
    out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << "\n";
  out << "CELL_TYPES " << mesh.n_triangles() << "\n";
  for (int t = 0; t < mesh.n_triangles(); ++t) out << "5\n";
  if (!point_scalar.empty()) {
    out << "POINT_DATA " << mesh.n_vertices() << "\n";
    out << "SCALARS " << scalar_name << " double 1\n";
    out << "LOOKUP_TABLE default\n";
    for (double v : point_scalar) out << format_double(v) << "\n";
  }
}

void write_solution_csv(const std::filesystem::path& path, const Mesh& mesh,
                        std::span<const double> u) {
  std::ofstream out = open_out(path);
  out << "vertex_id,x,y,u\n";
  for (int i = 0; i < mesh.n_vertices(); ++i) {
    out << i << ',' << format_double(mesh.vertices()[i].x) << ','
        << format_double(mesh.vertices()[i].y) << ',' << format_double(u[i])
        << "\n";
  }
}

void write_boundary_csv(const std::filesystem::path& path, const Mesh& mesh,
                        const BoundaryLoad& load, std::span<const double> u) {
  std::ofstream out = open_out(path);
  out << "s,f,u\n";
  const auto trace = mesh.boundary_trace(u);
  for (const BoundaryEdge& e : mesh.boundary_edges()) {
    const double mid = e.s_begin + 0.5 * e.length;
    out << format_double(e.s_begin) << ','
        << format_double(load.value_at(mesh, e.s_begin)) << ','
        << format_double(mesh.trace_at(trace, e.s_begin)) << "\n";
    out << format_double(mid) << ',' << format_double(load.value_at(mesh, mid))
        << ',' << format_double(mesh.trace_at(trace, mid)) << "\n";
  }
}

void write_region_csv(const std::filesystem::path& path,
                      const BoundaryRegion& region) {
  std::ofstream out = open_out(path);
  out << "s_begin,s_end\n";
  for (const ArcInterval& iv : region.intervals())
    out << format_double(iv.s_begin) << ',' << format_double(iv.s_end) << "\n";
}

BoundaryRegion read_region_csv(const std::filesystem::path& path,
                               double perimeter) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("s_begin", 0) != 0)
    throw ConfigError("region CSV must start with the header s_begin,s_end");
  std::vector<std::pair<double, double>> intervals;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string a, b;
    if (!std::getline(row, a, ',') || !std::getline(row, b, ','))
      throw ConfigError("malformed region CSV row: " + line);
    intervals.emplace_back(std::stod(a), std::stod(b));
  }
  return BoundaryRegion::from_intervals(perimeter, intervals);
}

void write_edge_load_csv(const std::filesystem::path& path,
                         std::span<const double> values) {
  std::ofstream out = open_out(path);
  out << "edge_id,f\n";
  for (std::size_t k = 0; k < values.size(); ++k)
    out << k << ',' << format_double(values[k]) << "\n";
}

std::vector<double> read_edge_load_csv(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("edge_id", 0) != 0)
    throw ConfigError("edge load CSV must start with the header edge_id,f");
  std::vector<std::pair<long, double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string a, b;
    if (!std::getline(row, a, ',') || !std::getline(row, b, ','))
      throw ConfigError("malformed edge load CSV row: " + line);
    rows.emplace_back(std::stol(a), std::stod(b));
  }
  std::sort(rows.begin(), rows.end());
  std::vector<double> values;
  values.reserve(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k].first != static_cast<long>(k))
      throw ConfigError("edge load CSV must cover edge ids 0..n-1 exactly");
    values.push_back(rows[k].second);
  }
  return values;
}

void write_extremal_csv(const std::filesystem::path& path,
                        std::span<const double> v) {
  std::ofstream out = open_out(path);
  out << "vertex_id,v\n";
  for (std::size_t i = 0; i < v.size(); ++i)
    out << i << ',' << format_double(v[i]) << "\n";
}

void write_table_csv(const std::filesystem::path& path,
                     const std::string& header,
                     std::span<const std::vector<double>> rows) {
  std::ofstream out = open_out(path);
  out << header << "\n";
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out << ',';
      out << format_double(row[k]);
    }
    out << "\n";
  }
}

// ---------------------------------------------------------------------------
// SVG plotting

namespace {

constexpr double kWidth = 640.0, kHeight = 420.0;
constexpr double kLeft = 70.0, kRight = 20.0, kTop = 40.0, kBottom = 50.0;
const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b"};

struct Range {
  double lo = 0.0, hi = 1.0;
  void expand(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
};

}  // namespace

void write_svg_plot(const std::filesystem::path& path, const std::string& title,
                    std::span<const PlotSeries> series, bool log_x, bool log_y) {
  // gather transformed points
  std::vector<std::vector<std::pair<double, double>>> data(series.size());
  bool any = false;
  double xlo = 0, xhi = 1, ylo = 0, yhi = 1;
  for (std::size_t s = 0; s < series.size(); ++s) {
    for (const auto& [px, py] : series[s].points) {
      if (log_x && !(px > 0.0)) continue;
      if (log_y && !(py > 0.0)) continue;
      const double x = log_x ? std::log10(px) : px;
      const double y = log_y ? std::log10(py) : py;
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      if (!any) {
        xlo = xhi = x;
        ylo = yhi = y;
        any = true;
      }
      xlo = std::min(xlo, x);
      xhi = std::max(xhi, x);
      ylo = std::min(ylo, y);
      yhi = std::max(yhi, y);
      data[s].emplace_back(x, y);
    }
  }
  if (xhi - xlo < 1e-300) {
    xlo -= 0.5;
    xhi += 0.5;
  }
  if (yhi - ylo < 1e-300) {
    ylo -= 0.5;
    yhi += 0.5;
  }

  auto sx = [&](double x) {
    return kLeft + (x - xlo) / (xhi - xlo) * (kWidth - kLeft - kRight);
  };
  auto sy = [&](double y) {
    return kHeight - kBottom - (y - ylo) / (yhi - ylo) * (kHeight - kTop - kBottom);
  };

  std::ofstream out = open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
      << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"15\">"
      << title << "</text>\n";

  // axes
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kHeight - kBottom << "\" x2=\""
      << kWidth - kRight << "\" y2=\"" << kHeight - kBottom
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
      << "\" y2=\"" << kHeight - kBottom << "\" stroke=\"black\"/>\n";

  auto tick_label = [&](double value, bool is_log) {
    return is_log ? "1e" + format_double(value) : format_double(value);
  };
  for (int k = 0; k <= 4; ++k) {
    const double fx = xlo + (xhi - xlo) * k / 4.0;
    const double fy = ylo + (yhi - ylo) * k / 4.0;
    out << "<line x1=\"" << sx(fx) << "\" y1=\"" << kHeight - kBottom
        << "\" x2=\"" << sx(fx) << "\" y2=\"" << kHeight - kBottom + 5
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << sx(fx) << "\" y=\"" << kHeight - kBottom + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"10\">"
        << tick_label(fx, log_x) << "</text>\n";
    out << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << sy(fy) << "\" x2=\""
        << kLeft << "\" y2=\"" << sy(fy) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << kLeft - 8 << "\" y=\"" << sy(fy) + 3
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
        << tick_label(fy, log_y) << "</text>\n";
  }

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % (sizeof kPalette / sizeof *kPalette)];
    if (!data[s].empty()) {
      out << "<polyline fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.5\" points=\"";
      for (const auto& [x, y] : data[s])
        out << format_double(sx(x)) << ',' << format_double(sy(y)) << ' ';
      out << "\"/>\n";
    }
    // legend entry
    const double ly = kTop + 14.0 * static_cast<double>(s);
    out << "<line x1=\"" << kWidth - kRight - 110 << "\" y1=\"" << ly
        << "\" x2=\"" << kWidth - kRight - 90 << "\" y2=\"" << ly
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << kWidth - kRight - 85 << "\" y=\"" << ly + 3
        << "\" font-family=\"sans-serif\" font-size=\"10\">" << series[s].label
        << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace membrane::io
