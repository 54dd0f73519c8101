#include "mongeampere/lower_hull.hpp"

#include <cmath>
#include <limits>

#include "mongeampere/error.hpp"

namespace mongeampere {

namespace {

using Mat3 = std::array<std::array<double, 3>, 3>;

bool invert(const Mat3& m, Mat3& inv) {
  const double c00 = m[1][1] * m[2][2] - m[1][2] * m[2][1];
  const double c01 = m[1][2] * m[2][0] - m[1][0] * m[2][2];
  const double c02 = m[1][0] * m[2][1] - m[1][1] * m[2][0];
  const double det = m[0][0] * c00 + m[0][1] * c01 + m[0][2] * c02;
  if (det == 0.0 || !std::isfinite(det)) return false;
  const double r = 1.0 / det;
  inv[0][0] = c00 * r;
  inv[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) * r;
  inv[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) * r;
  inv[1][0] = c01 * r;
  inv[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) * r;
  inv[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) * r;
  inv[2][0] = c02 * r;
  inv[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) * r;
  inv[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) * r;
  return true;
}

}  // namespace

HullSupport lower_hull_support(std::span<const Vec2> positions, std::span<const double> values, Vec2 x,
                               std::array<int, 3> start, int skip) {
  const int n = static_cast<int>(positions.size());
  double fscale = 0.0;
  double dscale = 0.0;
  for (int k = 0; k < n; ++k) {
    fscale = std::max(fscale, std::abs(values[k]));
    dscale = std::max(dscale, max_abs(positions[k] - x));
  }

  std::array<int, 3> basis = start;
  const int max_iter = 20 * n + 200;
  for (int iter = 0; iter < max_iter; ++iter) {
    Mat3 b{};
    for (int c = 0; c < 3; ++c) {
      const Vec2 d = positions[basis[c]] - x;
      b[0][c] = d.x;
      b[1][c] = d.y;
      b[2][c] = 1.0;
    }
    Mat3 binv{};
    if (!invert(b, binv)) throw Error(Errc::invalid_input, "degenerate lower-hull basis");

    // Barycentric weights of x in the basis triangle, and the plane through
    // the three lifted basis points.
    const std::array<double, 3> lambda{binv[0][2], binv[1][2], binv[2][2]};
    std::array<double, 3> y{};
    for (int r = 0; r < 3; ++r) {
      y[r] = binv[0][r] * values[basis[0]] + binv[1][r] * values[basis[1]] + binv[2][r] * values[basis[2]];
    }
    const Vec2 slope{y[0], y[1]};
    const double t = y[2];
    const double tol = 1e-13 * (1.0 + fscale + norm(slope) * dscale);

    const bool bland = iter > 100;
    int entering = -1;
    double best = -tol;
    for (int w = 0; w < n; ++w) {
      if (w == skip || w == basis[0] || w == basis[1] || w == basis[2]) continue;
      const double r = values[w] - t - dot(slope, positions[w] - x);
      if (r < best) {
        entering = w;
        if (bland) break;
        best = r;
      }
    }
    if (entering < 0) return {t, slope, basis};

    const Vec2 d = positions[entering] - x;
    std::array<double, 3> u{};
    for (int r = 0; r < 3; ++r) u[r] = binv[r][0] * d.x + binv[r][1] * d.y + binv[r][2];
    int leave = -1;
    double ratio = std::numeric_limits<double>::infinity();
    for (int c = 0; c < 3; ++c) {
      if (u[c] <= 1e-12) continue;
      const double q = std::max(lambda[c], 0.0) / u[c];
      if (q < ratio || (leave >= 0 && q == ratio && basis[c] < basis[leave])) {
        ratio = q;
        leave = c;
      }
    }
    if (leave < 0) throw Error(Errc::invalid_input, "lower-hull simplex found no leaving point");
    basis[leave] = entering;
  }
  throw Error(Errc::invalid_input, "lower-hull simplex did not terminate");
}

std::array<int, 3> fan_triangle(std::span<const Vec2> positions, std::span<const int> ring, Vec2 x) {
  const std::size_t m = ring.size();
  for (std::size_t k = 1; k + 1 < m; ++k) {
    const Vec2 a = positions[ring[0]];
    const Vec2 b = positions[ring[k]];
    const Vec2 c = positions[ring[k + 1]];
    const double area2 = cross(b - a, c - a);
    if (area2 <= 0.0) continue;
    const double tol = 1e-12 * area2;
    const double wa = cross(b - x, c - x);
    const double wb = cross(c - x, a - x);
    const double wc = cross(a - x, b - x);
    if (wa >= -tol && wb >= -tol && wc >= -tol) return {ring[0], ring[k], ring[k + 1]};
  }
  throw Error(Errc::outside_domain, "point is not inside the sample hull");
}

}  // namespace mongeampere
