#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mongeampere/analysis_checks.hpp"

namespace mongeampere {

enum class ProfileKind { pogorelov, wang };

/// Even profile h on a grid symmetric about 0, with h' and h'' from the ODE.
struct ODEProfile {
  ProfileKind kind = ProfileKind::pogorelov;
  int n = 0;              // dimension (Pogorelov only)
  double constant = 0.0;  // c(n) (Pogorelov only)
  std::vector<double> grid;
  std::vector<double> h;
  std::vector<double> h_prime;
  std::vector<double> h_double_prime;
  std::optional<double> blow_up_time;
};

struct OdeConfig {
  double rtol = 1e-10;
  double atol = 1e-14;
  /// Blow-up is declared when h exceeds this value.
  double blow_up_height = 1e6;
  /// Height at which integration switches from t to h as the independent variable.
  double switch_height = 10.0;
  long max_steps = 2'000'000;
};

struct PointEval {
  double value = 0.0;
  std::vector<double> gradient;
  SymMatrix hessian{2};
  double det_residual = 0.0;
};

/// Constant c(n) in h^{n-2}(h h'' - (2n-2)/(n-2) h'^2) = c(n) for which
/// u = |x'|^{2-2/n} h(x_n) has det D^2 u = 1. Obtained from a finite-difference
/// Hessian of the ansatz with a quadratic h; cached per n. Throws
/// Error{Errc::unsupported_dimension} for n < 3.
double pogorelov_constant(int n);

/// h(0) = 1, h'(0) = 0 forward to blow-up, then reflected. The blow-up time is
/// extrapolated from the times at which h reaches the threshold and half of it.
ODEProfile integrate_pogorelov(int n, const OdeConfig& config = {});

/// u = |x'|^{2-2/n} h(x_n) at x (size n) with closed-form derivatives.
/// Throws Error{Errc::singular_point} on the axis x' = 0 and
/// Error{Errc::outside_domain} for |x_n| beyond the profile.
PointEval pogorelov_eval(int n, const ODEProfile& profile, std::span<const double> x);

/// Integral of |D^2 u|_F^p over { r_inner < |x'| < r_outer, |x_n| < t_half } for n = 3.
double pogorelov_hessian_norm_integral(const ODEProfile& profile, double p, double r_inner, double r_outer,
                                       double t_half);

/// (1/4) h''(3h + t h') - h'^2 = 1, h(0) = 1, h'(0) = 0 on [-1, 1]. Throws
/// Error{Errc::integration_failure} if 3h + t h' <= 0 is reached.
ODEProfile integrate_wang(const OdeConfig& config = {});

/// u = x2^{3/2} h(x1 / sqrt(x2)) on { x1^2 <= x2 }. Throws Error{Errc::outside_domain}.
PointEval wang_eval(const ODEProfile& profile, double x1, double x2);

/// (h, h', h'') at t, integrating the profile ODE from the nearest grid point.
std::array<double, 3> profile_at(const ODEProfile& profile, double t);

/// |ODE left side - right side| / (magnitude of the left-side terms), max over the grid.
double ode_residual(const ODEProfile& profile);

/// Pogorelov profiles satisfy h'^2 = 2c/(n + 2k - 2) (h^{2k} - h^{2-n}) with
/// k = (2n-2)/(n-2). Max relative defect over grid points with h - 1 >= h_min.
double pogorelov_first_integral_defect(const ODEProfile& profile, double h_min = 1e-4);

/// Least-squares slope of log y against log t. Throws
/// Error{Errc::invalid_sample} for fewer than 3 samples or a non-positive value.
double fit_power_exponent(std::span<const std::pair<double, double>> samples);

namespace detail {
/// Finite-difference oracle behind pogorelov_constant() with base step `delta`.
double pogorelov_constant_fd(int n, double delta);
}  // namespace detail

}  // namespace mongeampere
