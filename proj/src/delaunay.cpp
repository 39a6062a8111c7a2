#include "rfmap/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "rfmap/errors.hpp"
#include "rfmap/predicates.hpp"
#include "rfmap/propagation.hpp"

namespace rfmap {

namespace {

using predicates::incircle;
using predicates::orient2d;

std::vector<Site> sorted_unique_sites(std::span<const Site> input) {
  std::vector<Site> sorted(input.begin(), input.end());
  for (const auto& s : sorted) {
    if (!std::isfinite(s.x) || !std::isfinite(s.y) || !std::isfinite(s.z_dbm)) {
      throw ContractViolation("site coordinates and values must be finite");
    }
  }
  std::stable_sort(sorted.begin(), sorted.end(), [](const Site& a, const Site& b) {
    return a.point() < b.point();
  });

  std::vector<Site> out;
  out.reserve(sorted.size());
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    double sum_mw = 0.0;
    // Sum in sorted-by-z order so the fused value ignores input order.
    std::vector<double> zs;
    while (j < sorted.size() && sorted[j].point() == sorted[i].point()) {
      zs.push_back(sorted[j].z_dbm);
      ++j;
    }
    if (zs.size() == 1) {
      out.push_back(sorted[i]);
    } else {
      std::sort(zs.begin(), zs.end());
      for (double z : zs) sum_mw += dbm_to_mw(z);
      out.push_back({sorted[i].x, sorted[i].y,
                     mw_to_dbm(sum_mw / static_cast<double>(zs.size()))});
    }
    i = j;
  }
  return out;
}

// Incremental construction over lexicographically sorted sites. Each new
// site is strictly outside the current hull, so insertion only ever adds a
// fan of triangles over the visible hull edges; Lawson flips restore the
// empty-circumcircle property. Ties (co-circular quads) are never flipped.
class Builder {
 public:
  explicit Builder(const std::vector<Site>& sites) : sites_(sites) {
    const std::size_t n = sites.size();
    hull_next_.assign(n, kNone);
    hull_prev_.assign(n, kNone);
  }

  std::vector<TriangleIndices> build() {
    const std::size_t n = sites_.size();
    std::size_t k = 2;
    while (k < n && orient2d(pt(0), pt(1), pt(k)) == 0) ++k;
    if (k == n) {
      throw DegenerateInput("all " + std::to_string(n) + " sites are collinear", n);
    }
    seed_fan(k);
    for (std::size_t v = k + 1; v < n; ++v) insert_outside(v);
    return tris_;
  }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  static std::uint64_t key(std::size_t u, std::size_t v) {
    return (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint64_t>(v);
  }

  Point pt(std::size_t i) const { return sites_[i].point(); }

  std::size_t add_triangle(std::size_t a, std::size_t b, std::size_t c) {
    const std::size_t t = tris_.size();
    tris_.push_back({a, b, c});
    set_edges(t);
    return t;
  }

  void set_edges(std::size_t t) {
    const auto& v = tris_[t];
    edges_[key(v[0], v[1])] = t;
    edges_[key(v[1], v[2])] = t;
    edges_[key(v[2], v[0])] = t;
  }

  // Sites 0..k-1 are collinear and sorted along their line; k is off it.
  void seed_fan(std::size_t k) {
    const bool apex_left = orient2d(pt(0), pt(1), pt(k)) > 0;
    for (std::size_t i = 0; i + 1 < k; ++i) {
      if (apex_left) {
        add_triangle(i, i + 1, k);
      } else {
        add_triangle(i + 1, i, k);
      }
    }
    // Hull in CCW order.
    auto link = [&](std::size_t u, std::size_t v) {
      hull_next_[u] = v;
      hull_prev_[v] = u;
    };
    if (apex_left) {
      for (std::size_t i = 0; i + 1 < k; ++i) link(i, i + 1);
      link(k - 1, k);
      link(k, 0);
    } else {
      for (std::size_t i = k - 1; i > 0; --i) link(i, i - 1);
      link(0, k);
      link(k, k - 1);
    }
    last_ = k;
    for (std::size_t i = 1; i + 1 < k; ++i) push_edge(i, k);
    legalize();
  }

  bool visible(std::size_t u, std::size_t v, std::size_t p) const {
    return orient2d(pt(u), pt(v), pt(p)) < 0;
  }

  void insert_outside(std::size_t p) {
    // The previous site is the lexicographic maximum of the hull, hence
    // visible from p; the visible hull chain touches it.
    std::size_t start = last_;
    std::size_t end = last_;
    while (visible(hull_prev_[start], start, p)) start = hull_prev_[start];
    while (visible(end, hull_next_[end], p)) end = hull_next_[end];

    for (std::size_t u = start; u != end; u = hull_next_[u]) {
      const std::size_t v = hull_next_[u];
      add_triangle(v, u, p);
      push_edge(v, u);
    }
    // Detach the interior chain from the hull list.
    for (std::size_t u = hull_next_[start]; u != end;) {
      const std::size_t next = hull_next_[u];
      hull_next_[u] = hull_prev_[u] = kNone;
      u = next;
    }
    hull_next_[start] = p;
    hull_prev_[p] = start;
    hull_next_[p] = end;
    hull_prev_[end] = p;
    last_ = p;
    legalize();
  }

  void push_edge(std::size_t u, std::size_t v) { stack_.push_back({u, v}); }

  void legalize() {
    while (!stack_.empty()) {
      const auto [a, b] = stack_.back();
      stack_.pop_back();
      const auto t1_it = edges_.find(key(a, b));
      const auto t2_it = edges_.find(key(b, a));
      if (t1_it == edges_.end() || t2_it == edges_.end()) continue;
      const std::size_t t1 = t1_it->second;
      const std::size_t t2 = t2_it->second;
      const std::size_t c = third(t1, a, b);
      const std::size_t d = third(t2, b, a);
      // t1 = (a, b, c) and t2 = (b, a, d), both counter-clockwise.
      if (incircle(pt(a), pt(b), pt(c), pt(d)) <= 0) continue;

      edges_.erase(key(a, b));
      edges_.erase(key(b, a));
      tris_[t1] = {a, d, c};
      tris_[t2] = {d, b, c};
      set_edges(t1);
      set_edges(t2);
      push_edge(a, d);
      push_edge(d, b);
      push_edge(b, c);
      push_edge(c, a);
    }
  }

  // Vertex of t other than the directed edge (u, v), rotating t so the
  // result is (u, v, w).
  std::size_t third(std::size_t t, std::size_t u, std::size_t v) const {
    const auto& tri = tris_[t];
    for (int i = 0; i < 3; ++i) {
      if (tri[i] == u && tri[(i + 1) % 3] == v) return tri[(i + 2) % 3];
    }
    throw std::logic_error("edge map out of sync with triangle list");
  }

  const std::vector<Site>& sites_;
  std::vector<TriangleIndices> tris_;
  std::unordered_map<std::uint64_t, std::size_t> edges_;
  std::vector<std::pair<std::size_t, std::size_t>> stack_;
  std::vector<std::size_t> hull_next_;
  std::vector<std::size_t> hull_prev_;
  std::size_t last_ = 0;

 public:
  std::size_t across(std::size_t u, std::size_t v) const {
    const auto it = edges_.find(key(v, u));
    return it == edges_.end() ? Triangulation::kNoNeighbor : it->second;
  }
};

}  // namespace

Plane plane_through(const Site& p1, const Site& p2, const Site& p3) {
  const double x21 = p2.x - p1.x, y21 = p2.y - p1.y, z21 = p2.z_dbm - p1.z_dbm;
  const double x31 = p3.x - p1.x, y31 = p3.y - p1.y, z31 = p3.z_dbm - p1.z_dbm;
  const double det = x21 * y31 - x31 * y21;
  if (det == 0.0) throw DegenerateInput("plane through collinear vertices", 3);
  Plane pl;
  pl.a = (z21 * y31 - z31 * y21) / det;
  pl.b = (x21 * z31 - x31 * z21) / det;
  // Averaging the three offsets spreads the rounding error evenly.
  pl.c = ((p1.z_dbm - pl.a * p1.x - pl.b * p1.y) + (p2.z_dbm - pl.a * p2.x - pl.b * p2.y) +
          (p3.z_dbm - pl.a * p3.x - pl.b * p3.y)) /
         3.0;
  return pl;
}

Triangulation triangulate(std::span<const Site> input) {
  Triangulation tri;
  tri.input_count_ = input.size();
  tri.sites_ = sorted_unique_sites(input);
  if (tri.sites_.size() < 3) {
    throw DegenerateInput("triangulation needs at least 3 distinct sites, got " +
                              std::to_string(tri.sites_.size()),
                          tri.sites_.size());
  }

  Builder builder(tri.sites_);
  tri.triangles_ = builder.build();

  tri.neighbors_.resize(tri.triangles_.size());
  tri.planes_.resize(tri.triangles_.size());
  for (std::size_t t = 0; t < tri.triangles_.size(); ++t) {
    const auto& v = tri.triangles_[t];
    for (int i = 0; i < 3; ++i) {
      tri.neighbors_[t][i] = builder.across(v[(i + 1) % 3], v[(i + 2) % 3]);
    }
    tri.planes_[t] = plane_through(tri.sites_[v[0]], tri.sites_[v[1]], tri.sites_[v[2]]);
  }
  return tri;
}

bool Triangulation::contains(std::size_t t, const Point& p) const {
  const auto& v = triangles_[t];
  for (int i = 0; i < 3; ++i) {
    if (orient2d(sites_[v[(i + 1) % 3]].point(), sites_[v[(i + 2) % 3]].point(), p) < 0) {
      return false;
    }
  }
  return true;
}

std::optional<std::size_t> Triangulation::locate_by_scan(const Point& p) const {
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    if (contains(t, p)) return t;
  }
  return std::nullopt;
}

std::optional<std::size_t> Triangulation::locate(const Point& p, std::size_t hint) const {
  if (triangles_.empty()) return std::nullopt;
  std::size_t t = hint < triangles_.size() ? hint : 0;
  // A visibility walk terminates on Delaunay triangulations; the cap only
  // protects against misuse.
  const std::size_t max_steps = 4 * triangles_.size() + 16;
  for (std::size_t step = 0; step < max_steps; ++step) {
    const auto& v = triangles_[t];
    bool moved = false;
    for (int i = 0; i < 3; ++i) {
      const Point a = sites_[v[(i + 1) % 3]].point();
      const Point b = sites_[v[(i + 2) % 3]].point();
      if (orient2d(a, b, p) < 0) {
        const std::size_t next = neighbors_[t][i];
        if (next == kNoNeighbor) return std::nullopt;  // beyond a hull edge
        t = next;
        moved = true;
        break;
      }
    }
    if (!moved) return canonical(t, p);
  }
  return locate_by_scan(p);
}

// Points on an edge or vertex lie in several closed triangles; report the
// lowest index among them so every query path picks the same plane.
std::size_t Triangulation::canonical(std::size_t t, const Point& p) const {
  std::size_t best = t;
  std::vector<std::size_t> todo{t};
  std::vector<std::size_t> seen{t};
  while (!todo.empty()) {
    const std::size_t cur = todo.back();
    todo.pop_back();
    const auto& v = triangles_[cur];
    for (int i = 0; i < 3; ++i) {
      if (orient2d(sites_[v[(i + 1) % 3]].point(), sites_[v[(i + 2) % 3]].point(), p) != 0) {
        continue;
      }
      const std::size_t next = neighbors_[cur][i];
      if (next == kNoNeighbor || std::find(seen.begin(), seen.end(), next) != seen.end()) {
        continue;
      }
      seen.push_back(next);
      if (!contains(next, p)) continue;
      best = std::min(best, next);
      todo.push_back(next);
    }
  }
  return best;
}

std::optional<double> Triangulation::interpolate(const Point& p, std::size_t& hint) const {
  const auto t = locate(p, hint);
  if (!t) return std::nullopt;
  hint = *t;
  return planes_[*t](p.x, p.y);
}

std::optional<double> Triangulation::interpolate(const Point& p) const {
  std::size_t hint = 0;
  return interpolate(p, hint);
}

double Triangulation::nearest_site_z(const Point& p) const {
  double best = std::numeric_limits<double>::infinity();
  double z = std::numeric_limits<double>::quiet_NaN();
  for (const auto& s : sites_) {
    const double d = (s.x - p.x) * (s.x - p.x) + (s.y - p.y) * (s.y - p.y);
    if (d < best) {
      best = d;
      z = s.z_dbm;
    }
  }
  return z;
}

GridValues Triangulation::interpolate_grid(const GridSpec& grid, HullFill fill) const {
  grid.validate();
  GridValues out;
  out.spec = grid;
  out.values.assign(grid.size(), std::numeric_limits<double>::quiet_NaN());
  out.mask.assign(grid.size(), 0);
  std::size_t hint = 0;
  for (std::size_t iy = 0; iy < grid.ny; ++iy) {
    for (std::size_t ix = 0; ix < grid.nx; ++ix) {
      const Point p = grid.node(ix, iy);
      const std::size_t idx = iy * grid.nx + ix;
      if (const auto z = interpolate(p, hint)) {
        out.values[idx] = *z;
        out.mask[idx] = 1;
      } else if (fill == HullFill::kNearestSite) {
        out.values[idx] = nearest_site_z(p);
      }
    }
  }
  return out;
}

nlohmann::json Triangulation::to_json() const {
  nlohmann::json sites = nlohmann::json::array();
  for (const auto& s : sites_) sites.push_back({s.x, s.y, s.z_dbm});
  nlohmann::json tris = nlohmann::json::array();
  for (const auto& t : triangles_) tris.push_back({t[0], t[1], t[2]});
  nlohmann::json planes = nlohmann::json::array();
  for (const auto& p : planes_) planes.push_back({p.a, p.b, p.c});
  return {{"sites", std::move(sites)}, {"triangles", std::move(tris)},
          {"planes", std::move(planes)}};
}

}  // namespace rfmap
