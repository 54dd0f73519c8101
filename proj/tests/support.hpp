#pragma once

// Shared fixtures and brute-force oracles for the tests. Nothing here calls the
// library's clipping or hull code.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include "mongeampere/dirichlet_solver.hpp"
#include "mongeampere/ma_measure.hpp"

namespace testing_support {

using mongeampere::BoundarySample;
using mongeampere::ConvexPolygon;
using mongeampere::DiracProblem;
using mongeampere::HalfPlane;
using mongeampere::Vec2;

inline ConvexPolygon square(double r = 1.0) { return ConvexPolygon({{-r, -r}, {r, -r}, {r, r}, {-r, r}}); }

inline ConvexPolygon regular_polygon(int m, double radius = 1.0, double phase = 0.0) {
  std::vector<Vec2> v;
  for (int k = 0; k < m; ++k) {
    const double a = phase + 2.0 * std::numbers::pi * k / m;
    v.push_back({radius * std::cos(a), radius * std::sin(a)});
  }
  return ConvexPolygon(v);
}

inline std::vector<BoundarySample> corner_samples(const ConvexPolygon& d, double value = 0.0) {
  std::vector<BoundarySample> s;
  for (Vec2 v : d.vertices()) s.push_back({v, value});
  return s;
}

/// Convex polygon from sorted random angles on an ellipse.
inline ConvexPolygon random_domain(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(4, 8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int m = count(rng);
  std::vector<double> angles;
  for (int k = 0; k < m; ++k) angles.push_back((k + 0.2 + 0.6 * u(rng)) * 2.0 * std::numbers::pi / m);
  const double a = 0.8 + 0.6 * u(rng);
  const double b = 0.8 + 0.6 * u(rng);
  std::vector<Vec2> v;
  for (double t : angles) v.push_back({a * std::cos(t), b * std::sin(t)});
  return ConvexPolygon(v);
}

/// Rejection-sampled interior points with a minimum separation and distance to the boundary.
inline std::vector<Vec2> random_nodes(std::mt19937_64& rng, const ConvexPolygon& d, int count, double sep) {
  Vec2 lo = d.vertex(0), hi = lo;
  for (Vec2 v : d.vertices()) {
    lo = {std::min(lo.x, v.x), std::min(lo.y, v.y)};
    hi = {std::max(hi.x, v.x), std::max(hi.y, v.y)};
  }
  std::uniform_real_distribution<double> ux(lo.x, hi.x), uy(lo.y, hi.y);
  std::vector<Vec2> out;
  for (int tries = 0; static_cast<int>(out.size()) < count && tries < 200000; ++tries) {
    const Vec2 p{ux(rng), uy(rng)};
    if (!d.strictly_contains(p) || d.boundary_distance(p) < 0.5 * sep) continue;
    bool ok = true;
    for (Vec2 q : out) ok = ok && std::hypot(p.x - q.x, p.y - q.y) >= sep;
    if (ok) out.push_back(p);
  }
  return out;
}

/// Convex data: a positive semidefinite quadratic plus an affine part, sampled
/// at the vertices and `per_edge - 1` interior points per edge.
inline std::vector<BoundarySample> random_convex_boundary(std::mt19937_64& rng, const ConvexPolygon& d,
                                                          int per_edge) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double a = 1.0 + u(rng), b = 1.0 + u(rng), c = 0.9 * std::sqrt(a * b) * u(rng);
  const double gx = u(rng), gy = u(rng), k = u(rng);
  auto phi = [=](Vec2 y) {
    const double q = a * y.x * y.x + 2.0 * c * y.x * y.y + b * y.y * y.y;
    return 0.5 * q + gx * y.x + gy * y.y + k + 0.3 * std::hypot(y.x - 0.1, y.y + 0.2);
  };
  return mongeampere::sample_boundary(d, phi, per_edge);
}

// ------------------------------------------------------------------ oracles

/// Vertices of { p : n.p <= c } by enumerating pairwise line intersections;
/// nullopt if the feasible set is empty or has fewer than 3 distinct vertices.
inline std::optional<std::vector<Vec2>> brute_force_polygon(const std::vector<HalfPlane>& planes, double tol = 1e-9) {
  std::vector<Vec2> pts;
  for (std::size_t i = 0; i < planes.size(); ++i) {
    for (std::size_t j = i + 1; j < planes.size(); ++j) {
      const Vec2 a = planes[i].normal, b = planes[j].normal;
      const double det = a.x * b.y - a.y * b.x;
      if (std::abs(det) < 1e-14 * std::hypot(a.x, a.y) * std::hypot(b.x, b.y)) continue;
      const Vec2 p{(planes[i].offset * b.y - planes[j].offset * a.y) / det,
                   (a.x * planes[j].offset - b.x * planes[i].offset) / det};
      bool feasible = true;
      for (const HalfPlane& h : planes) {
        const double scale = std::hypot(h.normal.x, h.normal.y) * (1.0 + std::abs(p.x) + std::abs(p.y));
        feasible = feasible && h.normal.x * p.x + h.normal.y * p.y - h.offset <= tol * scale;
      }
      if (feasible) pts.push_back(p);
    }
  }
  // Angular sort around the centroid, then drop near-duplicates.
  if (pts.size() < 3) return std::nullopt;
  Vec2 c;
  for (Vec2 p : pts) c = c + p;
  c = c / static_cast<double>(pts.size());
  std::sort(pts.begin(), pts.end(), [&](Vec2 a, Vec2 b) {
    return std::atan2(a.y - c.y, a.x - c.x) < std::atan2(b.y - c.y, b.x - c.x);
  });
  std::vector<Vec2> out;
  for (Vec2 p : pts) {
    if (out.empty() || std::hypot(p.x - out.back().x, p.y - out.back().y) > 1e-9) out.push_back(p);
  }
  while (out.size() > 1 && std::hypot(out.front().x - out.back().x, out.front().y - out.back().y) <= 1e-9) {
    out.pop_back();
  }
  if (out.size() < 3) return std::nullopt;
  return out;
}

inline double shoelace(const std::vector<Vec2>& v) {
  double a = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const Vec2 p = v[k], q = v[(k + 1) % v.size()];
    a += p.x * q.y - p.y * q.x;
  }
  return 0.5 * std::abs(a);
}

/// Lower-hull value at x by brute force over all triangles of lifted points
/// containing x (the optimum of the hull LP sits on such a triangle).
inline double brute_force_hull(const std::vector<Vec2>& pos, const std::vector<double>& val, Vec2 x) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = pos.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        const Vec2 a = pos[i], b = pos[j], c = pos[k];
        const double area2 = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
        if (std::abs(area2) < 1e-14) continue;
        const double la = ((b.x - x.x) * (c.y - x.y) - (b.y - x.y) * (c.x - x.x)) / area2;
        const double lb = ((c.x - x.x) * (a.y - x.y) - (c.y - x.y) * (a.x - x.x)) / area2;
        const double lc = 1.0 - la - lb;
        if (la < -1e-12 || lb < -1e-12 || lc < -1e-12) continue;
        best = std::min(best, la * val[i] + lb * val[j] + lc * val[k]);
      }
    }
  }
  return best;
}

/// Subgradient-cell area of node i by brute-force vertex enumeration.
inline double brute_force_cell_area(const mongeampere::NodalConvexFunction& f, std::size_t i) {
  const auto pos = f.lifted_positions();
  const std::vector<double> val = f.lifted_values();
  std::vector<HalfPlane> planes;
  for (std::size_t w = 0; w < pos.size(); ++w) {
    if (w == i) continue;
    planes.push_back({pos[w] - pos[i], val[w] - val[i]});
  }
  const auto poly = brute_force_polygon(planes);
  return poly ? shoelace(*poly) : 0.0;
}

/// Random zero- or convex-boundary Dirac problem with up to `max_nodes` nodes.
inline DiracProblem random_problem(std::mt19937_64& rng, int max_nodes, bool zero_boundary) {
  const ConvexPolygon d = random_domain(rng);
  std::uniform_int_distribution<int> count(1, max_nodes);
  std::vector<Vec2> nodes = random_nodes(rng, d, count(rng), 0.6 / std::sqrt(static_cast<double>(max_nodes)));
  std::uniform_real_distribution<double> mass(0.0, 1.0);
  std::vector<double> alpha;
  for (std::size_t i = 0; i < nodes.size(); ++i) alpha.push_back(mass(rng) < 0.1 ? 0.0 : 0.02 + 0.3 * mass(rng));
  std::vector<BoundarySample> b = zero_boundary ? mongeampere::sample_boundary(d, [](Vec2) { return 0.0; }, 2)
                                                : random_convex_boundary(rng, d, 4);
  return {d, b, nodes, alpha};
}

}  // namespace testing_support
