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

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "membrane/fem.hpp"
#include "membrane/geometry.hpp"

// File emitters. All numeric output goes through the shortest round-trip
// decimal form (std::to_chars), so files are byte-stable for a fixed seed.

namespace membrane::io {

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double value);

/// VTK legacy ASCII UNSTRUCTURED_GRID (triangles, cell type 5), with an
/// optional POINT_DATA scalar field.
void write_vtk(const std::filesystem::path& path, const Mesh& mesh,
               std::span<const double> point_scalar = {},
               const std::string& scalar_name = "u");

/// CSV `vertex_id,x,y,u`.
void write_solution_csv(const std::filesystem::path& path, const Mesh& mesh,
                        std::span<const double> u);

/// CSV `s,f,u`: boundary trace of the load and the state, sampled at the
/// boundary vertices and at edge midpoints (so indicator steps show up).
void write_boundary_csv(const std::filesystem::path& path, const Mesh& mesh,
                        const BoundaryLoad& load, std::span<const double> u);

/// CSV `s_begin,s_end`.
void write_region_csv(const std::filesystem::path& path,
                      const BoundaryRegion& region);

/// Reads back a region CSV (header required).
BoundaryRegion read_region_csv(const std::filesystem::path& path,
                               double perimeter);

/// CSV `edge_id,f`.
void write_edge_load_csv(const std::filesystem::path& path,
                         std::span<const double> values);

/// Reads `edge_id,f` (header required); values returned in edge order.
std::vector<double> read_edge_load_csv(const std::filesystem::path& path);

/// CSV `vertex_id,v`.
void write_extremal_csv(const std::filesystem::path& path,
                        std::span<const double> v);

/// Generic CSV: header row plus rows of doubles.
void write_table_csv(const std::filesystem::path& path,
                     const std::string& header,
                     std::span<const std::vector<double>> rows);

struct PlotSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

/// Small self-contained SVG line plot (axes, ticks, legend). Log axes take
/// log10 of the data; nonpositive values are skipped there. Degenerate or
/// empty series still produce a valid plot frame.
void write_svg_plot(const std::filesystem::path& path, const std::string& title,
                    std::span<const PlotSeries> series, bool log_x = false,
                    bool log_y = false);

}  // namespace membrane::io
