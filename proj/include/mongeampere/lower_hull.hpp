#pragma once

#include <array>
#include <span>

#include "mongeampere/convex_geom.hpp"

namespace mongeampere {

/// Supporting plane of the lower convex hull of lifted points above a query
/// point x: value + slope . (y - x) lies below every lifted point and touches
/// the hull at x. `basis` holds the indices of three lifted points whose
/// triangle contains x and spans the supporting plane.
struct HullSupport {
  double value = 0.0;
  Vec2 slope;
  std::array<int, 3> basis{};
};

/// Value of the lower convex hull of {(positions[k], values[k])} at x.
///
/// Solves  min sum_k lambda_k values[k]  subject to  sum_k lambda_k = 1,
/// sum_k lambda_k positions[k] = x,  lambda >= 0  by a revised simplex whose
/// bases are triangles containing x. `start` must be a triangle of indices
/// containing x (for instance from fan_triangle()). Index `skip` (if >= 0) is
/// excluded from the point set.
HullSupport lower_hull_support(std::span<const Vec2> positions, std::span<const double> values, Vec2 x,
                               std::array<int, 3> start, int skip = -1);

/// A triangle (v0, v_k, v_{k+1}) of the fan over `ring` (indices of points in
/// convex position, counter-clockwise) that contains x. Throws
/// Error{Errc::outside_domain} if no fan triangle contains x.
std::array<int, 3> fan_triangle(std::span<const Vec2> positions, std::span<const int> ring, Vec2 x);

}  // namespace mongeampere
