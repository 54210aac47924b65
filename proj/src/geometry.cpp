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

#include "membrane/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace membrane {

namespace {

constexpr double kPi = std::numbers::pi;

double signed_area(const Vec2& p0, const Vec2& p1, const Vec2& p2) {
  return 0.5 * ((p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y));
}

double positive_mod(double s, double period) {
  double r = std::fmod(s, period);
  if (r < 0.0) r += period;
  // fmod can return exactly `period` after the correction when s is a tiny
  // negative number.
  if (r >= period) r -= period;
  return r;
}

}  // namespace

void DomainSpec::validate() const {
  if (!(size > 0.0)) throw ConfigError("domain size must be positive");
  if (n_boundary < 3) throw ConfigError("n_boundary must be at least 3");
  if (refinements < 0) throw ConfigError("refinements must be nonnegative");
  if (kind == Kind::Square && n_boundary % 4 != 0)
    throw ConfigError("square domains need n_boundary divisible by 4");
}

Mesh Mesh::from_parts(std::vector<Vec2> vertices,
                      std::vector<std::array<int, 3>> triangles,
                      std::optional<double> circle_radius, int start_vertex) {
  Mesh mesh;
  mesh.vertices_ = std::move(vertices);
  mesh.triangles_ = std::move(triangles);
  mesh.circle_radius_ = circle_radius;

  const int nv = mesh.n_vertices();
  mesh.tri_area_.reserve(mesh.triangles_.size());
  mesh.area_ = 0.0;
  for (const auto& t : mesh.triangles_) {
    for (int v : t)
      if (v < 0 || v >= nv) throw ConfigError("triangle vertex index out of range");
    double a = signed_area(mesh.vertices_[t[0]], mesh.vertices_[t[1]],
                           mesh.vertices_[t[2]]);
    if (!(a > 0.0)) throw ConfigError("triangle with non-positive signed area");
    mesh.tri_area_.push_back(a);
    mesh.area_ += a;
  }

  // Directed edges of positively oriented triangles traverse the boundary
  // counterclockwise; an edge is on the boundary iff its reverse never
  // appears.
  std::map<std::pair<int, int>, int> owner;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.triangles_[t];
    for (int e = 0; e < 3; ++e) {
      auto key = std::make_pair(tri[e], tri[(e + 1) % 3]);
      if (!owner.emplace(key, t).second)
        throw ConfigError("duplicate directed edge; inconsistent orientation");
    }
  }
  std::map<int, std::pair<int, int>> next_of;  // a -> (b, triangle)
  for (const auto& [edge, t] : owner) {
    if (owner.count({edge.second, edge.first})) continue;  // interior edge
    if (!next_of.emplace(edge.first, std::make_pair(edge.second, t)).second)
      throw ConfigError("boundary is not a single loop (branching vertex)");
  }
  if (next_of.empty()) throw ConfigError("mesh has no boundary");

  int start = start_vertex;
  if (start < 0) start = next_of.begin()->first;
  if (!next_of.count(start)) throw ConfigError("start vertex is not on the boundary");

  double s = 0.0;
  int v = start;
  do {
    auto it = next_of.find(v);
    if (it == next_of.end()) throw ConfigError("boundary loop does not close");
    const auto [w, t] = it->second;
    BoundaryEdge edge;
    edge.a = v;
    edge.b = w;
    edge.tri = t;
    const Vec2 pa = mesh.vertices_[v];
    const Vec2 pb = mesh.vertices_[w];
    const double dx = pb.x - pa.x;
    const double dy = pb.y - pa.y;
    edge.length = std::hypot(dx, dy);
    if (!(edge.length > 0.0)) throw ConfigError("zero-length boundary edge");
    edge.s_begin = s;
    edge.normal = {dy / edge.length, -dx / edge.length};
    s += edge.length;
    mesh.boundary_.push_back(edge);
    mesh.boundary_vertex_.push_back(v);
    v = w;
  } while (v != start);
  if (mesh.boundary_.size() != next_of.size())
    throw ConfigError("boundary has more than one loop");
  mesh.perimeter_ = s;
  return mesh;
}

double Mesh::triangle_area(int t) const { return tri_area_[t]; }

std::vector<double> Mesh::boundary_trace(std::span<const double> nodal) const {
  std::vector<double> trace(boundary_vertex_.size());
  for (std::size_t k = 0; k < boundary_vertex_.size(); ++k)
    trace[k] = nodal[boundary_vertex_[k]];
  return trace;
}

int Mesh::edge_at(double s) const {
  const double sm = positive_mod(s, perimeter_);
  // first edge with s_begin > sm, then step back
  auto it = std::upper_bound(boundary_.begin(), boundary_.end(), sm,
                             [](double value, const BoundaryEdge& e) {
                               return value < e.s_begin;
                             });
  if (it == boundary_.begin()) return static_cast<int>(boundary_.size()) - 1;
  return static_cast<int>(std::distance(boundary_.begin(), it)) - 1;
}

double Mesh::trace_at(std::span<const double> trace, double s) const {
  const double sm = positive_mod(s, perimeter_);
  const int k = edge_at(sm);
  const BoundaryEdge& e = boundary_[k];
  const double lambda = (sm - e.s_begin) / e.length;
  const std::size_t kn = (k + 1) % boundary_.size();
  return (1.0 - lambda) * trace[k] + lambda * trace[kn];
}

namespace {

Mesh build_disk(double radius, int n_boundary) {
  const int n = n_boundary;
  const int rings = std::max(1, static_cast<int>(std::lround(n / (2.0 * kPi))));
  std::vector<Vec2> verts;
  verts.reserve(1 + static_cast<std::size_t>(rings) * n);
  verts.push_back({0.0, 0.0});
  for (int k = 1; k <= rings; ++k) {
    const double r = radius * k / rings;
    for (int j = 0; j < n; ++j) {
      const double th = 2.0 * kPi * j / n;
      verts.push_back({r * std::cos(th), r * std::sin(th)});
    }
  }
  auto idx = [n](int ring, int j) { return 1 + (ring - 1) * n + (j % n); };

  std::vector<std::array<int, 3>> tris;
  tris.reserve(static_cast<std::size_t>(n) * (2 * rings - 1));
  for (int j = 0; j < n; ++j) tris.push_back({0, idx(1, j), idx(1, j + 1)});
  for (int k = 1; k < rings; ++k) {
    for (int j = 0; j < n; ++j) {
      const int a = idx(k, j), b = idx(k + 1, j);
      const int c = idx(k + 1, j + 1), d = idx(k, j + 1);
      // Mirror the quad diagonals across the theta = 0 axis so the whole
      // triangulation is symmetric under reflection about it.
      if (j < n / 2) {
        tris.push_back({a, b, c});
        tris.push_back({a, c, d});
      } else {
        tris.push_back({a, b, d});
        tris.push_back({b, c, d});
      }
    }
  }
  return Mesh::from_parts(std::move(verts), std::move(tris), radius,
                          idx(rings, 0));
}

Mesh build_square(double side, int n_boundary) {
  const int m = n_boundary / 4;
  const double h = side / m;
  std::vector<Vec2> verts;
  verts.reserve(static_cast<std::size_t>(m + 1) * (m + 1));
  for (int j = 0; j <= m; ++j)
    for (int i = 0; i <= m; ++i) verts.push_back({i * h, j * h});
  auto idx = [m](int i, int j) { return j * (m + 1) + i; };
  std::vector<std::array<int, 3>> tris;
  tris.reserve(static_cast<std::size_t>(m) * m * 2);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      tris.push_back({idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)});
      tris.push_back({idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)});
    }
  }
  return Mesh::from_parts(std::move(verts), std::move(tris), std::nullopt,
                          idx(0, 0));
}

}  // namespace

Mesh build_mesh(const DomainSpec& spec) {
  spec.validate();
  Mesh mesh = spec.kind == DomainSpec::Kind::Disk
                  ? build_disk(spec.size, spec.n_boundary)
                  : build_square(spec.size, spec.n_boundary);
  for (int r = 0; r < spec.refinements; ++r) mesh = refine_uniform(mesh);
  return mesh;
}

Mesh refine_uniform(const Mesh& mesh) {
  std::vector<Vec2> verts = mesh.vertices();
  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int a, int b) {
    auto key = std::minmax(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    const Vec2 pa = verts[a];
    const Vec2 pb = verts[b];
    const int id = static_cast<int>(verts.size());
    verts.push_back({0.5 * (pa.x + pb.x), 0.5 * (pa.y + pb.y)});
    midpoint.emplace(key, id);
    return id;
  };

  std::vector<std::array<int, 3>> tris;
  tris.reserve(mesh.triangles().size() * 4);
  for (const auto& t : mesh.triangles()) {
    const int ab = mid(t[0], t[1]);
    const int bc = mid(t[1], t[2]);
    const int ca = mid(t[2], t[0]);
    tris.push_back({t[0], ab, ca});
    tris.push_back({t[1], bc, ab});
    tris.push_back({t[2], ca, bc});
    tris.push_back({ab, bc, ca});
  }

  if (mesh.circle_radius()) {
    const double radius = *mesh.circle_radius();
    for (const auto& e : mesh.boundary_edges()) {
      const int m = midpoint.at(std::minmax(e.a, e.b));
      Vec2& p = verts[m];
      const double r = std::hypot(p.x, p.y);
      p.x *= radius / r;
      p.y *= radius / r;
    }
  }

  const int start = mesh.boundary_vertices().empty() ? -1 : mesh.boundary_vertices()[0];
  return Mesh::from_parts(std::move(verts), std::move(tris), mesh.circle_radius(),
                          start);
}

// ---------------------------------------------------------------------------
// BoundaryRegion

BoundaryRegion BoundaryRegion::from_intervals(
    double perimeter, std::span<const std::pair<double, double>> intervals) {
  if (!(perimeter > 0.0)) throw DomainError("region perimeter must be positive");
  BoundaryRegion region;
  region.perimeter_ = perimeter;
  const double drop_tol = 1e-12 * perimeter;

  std::vector<ArcInterval> parts;
  for (const auto& [raw_begin, raw_end] : intervals) {
    const double len = raw_end - raw_begin;
    if (len < -drop_tol) throw DomainError("interval with negative length");
    if (len > perimeter * (1.0 + 1e-12))
      throw DomainError("interval longer than the perimeter");
    if (len <= drop_tol) continue;
    if (len >= perimeter - drop_tol) {
      parts.push_back({0.0, perimeter});
      continue;
    }
    const double a = positive_mod(raw_begin, perimeter);
    const double b = a + len;
    if (b <= perimeter) {
      parts.push_back({a, b});
    } else {
      parts.push_back({a, perimeter});
      parts.push_back({0.0, b - perimeter});
    }
  }

  std::sort(parts.begin(), parts.end(),
            [](const ArcInterval& p, const ArcInterval& q) {
              return p.s_begin < q.s_begin;
            });
  for (const ArcInterval& part : parts) {
    if (!region.intervals_.empty()) {
      ArcInterval& last = region.intervals_.back();
      if (part.s_begin < last.s_end - drop_tol)
        throw DomainError("overlapping region intervals");
      if (part.s_begin <= last.s_end + drop_tol) {  // touching: merge
        last.s_end = std::max(last.s_end, part.s_end);
        continue;
      }
    }
    region.intervals_.push_back(part);
  }
  // full-boundary overlap check across the wrap
  double total = 0.0;
  for (const ArcInterval& iv : region.intervals_) total += iv.length();
  if (total > perimeter * (1.0 + 1e-12))
    throw DomainError("region intervals cover more than the perimeter");
  // drop re-introduced degenerates
  std::erase_if(region.intervals_,
                [&](const ArcInterval& iv) { return iv.length() <= drop_tol; });
  return region;
}

double BoundaryRegion::measure() const {
  double total = 0.0;
  for (const ArcInterval& iv : intervals_) total += iv.length();
  return total;
}

bool BoundaryRegion::full() const {
  return !intervals_.empty() && measure() >= perimeter_ * (1.0 - 1e-12);
}

std::vector<RegionEndpoint> BoundaryRegion::endpoints() const {
  std::vector<RegionEndpoint> pts;
  if (intervals_.empty() || full()) return pts;
  const double tol = 1e-12 * perimeter_;
  const bool wraps = intervals_.front().s_begin <= tol &&
                     intervals_.back().s_end >= perimeter_ - tol;
  for (std::size_t k = 0; k < intervals_.size(); ++k) {
    const ArcInterval& iv = intervals_[k];
    const bool skip_begin = wraps && k == 0;
    const bool skip_end = wraps && k + 1 == intervals_.size();
    if (!skip_begin) pts.push_back({iv.s_begin, -1});
    if (!skip_end) pts.push_back({iv.s_end, +1});
  }
  std::sort(pts.begin(), pts.end(),
            [](const RegionEndpoint& p, const RegionEndpoint& q) { return p.s < q.s; });
  return pts;
}

bool BoundaryRegion::contains(double s) const {
  const double sm = positive_mod(s, perimeter_);
  for (const ArcInterval& iv : intervals_) {
    if (sm >= iv.s_begin && sm < iv.s_end) return true;
  }
  return false;
}

double BoundaryRegion::overlap_length(double a, double b) const {
  double total = 0.0;
  for (const ArcInterval& iv : intervals_) {
    const double lo = std::max(a, iv.s_begin);
    const double hi = std::min(b, iv.s_end);
    if (hi > lo) total += hi - lo;
  }
  return total;
}

std::vector<ArcInterval> BoundaryRegion::overlap(double a, double b) const {
  std::vector<ArcInterval> pieces;
  for (const ArcInterval& iv : intervals_) {
    const double lo = std::max(a, iv.s_begin);
    const double hi = std::min(b, iv.s_end);
    if (hi > lo) pieces.push_back({lo, hi});
  }
  return pieces;
}

BoundaryRegion arc_region(double center_s, double measure, double perimeter) {
  if (measure < 0.0 || measure > perimeter * (1.0 + 1e-12))
    throw DomainError("arc measure must lie in [0, perimeter]");
  const std::pair<double, double> iv{center_s - 0.5 * measure,
                                     center_s + 0.5 * measure};
  return BoundaryRegion::from_intervals(perimeter, std::span(&iv, 1));
}

double region_measure(const BoundaryRegion& region) { return region.measure(); }

}  // namespace membrane
