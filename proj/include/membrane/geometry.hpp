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

#include <array>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "membrane/errors.hpp"

namespace membrane {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct BoundaryEdge {
  int a = -1;        ///< first vertex (loop order, counterclockwise)
  int b = -1;        ///< second vertex
  int tri = -1;      ///< the unique triangle owning this edge
  double length = 0.0;
  double s_begin = 0.0;  ///< arc-length coordinate of vertex a
  Vec2 normal;           ///< outward unit normal
};

struct DomainSpec {
  enum class Kind { Disk, Square };
  Kind kind = Kind::Disk;
  double size = 1.0;   ///< disk radius or square side
  int n_boundary = 64; ///< boundary segments before refinement
  int refinements = 0;
  void validate() const;  // throws ConfigError
};

/// 2-D triangulation with an ordered, arc-length parameterized boundary
/// loop. Immutable after construction; safe to share across threads.
class Mesh {
 public:
  /// Builds the boundary loop and validates all mesh invariants.
  /// `start_vertex` selects the boundary vertex at arc length 0; if < 0 an
  /// arbitrary deterministic choice is made. `circle_radius` marks meshes
  /// whose boundary vertices lie on a circle centered at the origin (used
  /// by refinement to project new boundary vertices back onto it).
  static Mesh from_parts(std::vector<Vec2> vertices,
                         std::vector<std::array<int, 3>> triangles,
                         std::optional<double> circle_radius = std::nullopt,
                         int start_vertex = -1);

  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_; }

  int n_vertices() const { return static_cast<int>(vertices_.size()); }
  int n_triangles() const { return static_cast<int>(triangles_.size()); }
  int n_boundary_edges() const { return static_cast<int>(boundary_.size()); }

  double perimeter() const { return perimeter_; }
  double area() const { return area_; }
  double triangle_area(int t) const;
  std::optional<double> circle_radius() const { return circle_radius_; }

  /// Boundary vertices in loop order; entry k is boundary_edges()[k].a.
  const std::vector<int>& boundary_vertices() const { return boundary_vertex_; }

  /// Restriction of a nodal field to the boundary loop (one value per
  /// boundary vertex, loop order).
  std::vector<double> boundary_trace(std::span<const double> nodal) const;

  /// Piecewise-linear interpolation of a boundary trace at arc length s
  /// (taken modulo the perimeter).
  double trace_at(std::span<const double> trace, double s) const;

  /// Index of the boundary edge containing arc length s (mod perimeter).
  int edge_at(double s) const;

 private:
  Mesh() = default;
  std::vector<Vec2> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<BoundaryEdge> boundary_;
  std::vector<int> boundary_vertex_;
  std::vector<double> tri_area_;
  std::optional<double> circle_radius_;
  double perimeter_ = 0.0;
  double area_ = 0.0;
};

Mesh build_mesh(const DomainSpec& spec);

/// Splits every triangle into four. New boundary vertices are projected
/// back onto the circle for disk meshes.
Mesh refine_uniform(const Mesh& mesh);

/// Half-open arc interval [s_begin, s_end), 0 <= s_begin < s_end <= P.
struct ArcInterval {
  double s_begin = 0.0;
  double s_end = 0.0;
  double length() const { return s_end - s_begin; }
};

/// A topological boundary point of a region: `sign` is the direction of
/// the outward tangent of the region in arc-length coordinates (+1 at an
/// interval end, -1 at an interval begin).
struct RegionEndpoint {
  double s = 0.0;
  int sign = 0;
};

/// Union of disjoint arc intervals on the boundary loop. Stored
/// normalized: sorted, pairwise disjoint, wrap-around intervals split at
/// s = 0, degenerate intervals (length < 1e-12 * P) dropped.
class BoundaryRegion {
 public:
  BoundaryRegion() = default;

  /// Intervals are given as (s_begin, s_end) with s_end >= s_begin and
  /// s_end - s_begin <= P; endpoints may be any reals (reduced mod P).
  /// Throws DomainError on overlapping input intervals.
  static BoundaryRegion from_intervals(
      double perimeter, std::span<const std::pair<double, double>> intervals);

  double perimeter() const { return perimeter_; }
  double measure() const;
  bool empty() const { return intervals_.empty(); }
  bool full() const;
  const std::vector<ArcInterval>& intervals() const { return intervals_; }

  /// Real topological endpoints in increasing arc-length order. The split
  /// at s = 0 of wrap-around intervals is merged away; empty and full
  /// regions have no endpoints. Signs alternate along the loop.
  std::vector<RegionEndpoint> endpoints() const;

  bool contains(double s) const;

  /// Measure of region ∩ [a, b), for 0 <= a <= b <= P.
  double overlap_length(double a, double b) const;

  /// Pieces of region ∩ [a, b) in absolute coordinates.
  std::vector<ArcInterval> overlap(double a, double b) const;

 private:
  double perimeter_ = 0.0;
  std::vector<ArcInterval> intervals_;
};

/// Single arc of measure A centered at center_s, wrapped modulo P.
/// A = 0 gives the empty region, A = P the full boundary.
BoundaryRegion arc_region(double center_s, double measure, double perimeter);

double region_measure(const BoundaryRegion& region);

}  // namespace membrane
