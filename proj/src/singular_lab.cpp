#include "mongeampere/singular_lab.hpp"

#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>

#include "mongeampere/error.hpp"

namespace mongeampere {

namespace {

namespace odeint = boost::numeric::odeint;
using State = std::array<double, 2>;

double pogorelov_k(int n) { return (2.0 * n - 2.0) / (n - 2.0); }
double pogorelov_alpha(int n) { return 2.0 - 2.0 / n; }

double pogorelov_hpp(double c, int n, double h, double p) {
  return (c * std::pow(h, 2.0 - n) + pogorelov_k(n) * p * p) / h;
}

double wang_hpp(double t, double h, double p) {
  const double den = 3.0 * h + t * p;
  if (!(den > 0.0)) throw Error(Errc::integration_failure, "Wang profile denominator 3h + t h' is not positive");
  return 4.0 * (1.0 + p * p) / den;
}

double second_derivative(const ODEProfile& prof, double t, double h, double p) {
  return prof.kind == ProfileKind::pogorelov ? pogorelov_hpp(prof.constant, prof.n, h, p) : wang_hpp(t, h, p);
}

/// Advances `x` from `s` to exactly `s_end` with an adaptive Dormand-Prince
/// pair, calling `observe(s, x)` after every accepted step.
template <class System, class Observer>
void advance(System sys, State& x, double& s, double s_end, double& ds, const OdeConfig& cfg, long& steps,
             Observer observe) {
  auto stepper = odeint::make_controlled(cfg.atol, cfg.rtol, odeint::runge_kutta_dopri5<State>());
  while (s < s_end) {
    if (++steps > cfg.max_steps) throw Error(Errc::integration_failure, "step limit exceeded");
    double step = std::min(ds, s_end - s);
    const bool last = step >= s_end - s;
    const double before = s;
    if (stepper.try_step(sys, x, s, step) == odeint::success) {
      if (last) s = s_end;
      ds = step;
      observe(s, x);
    } else {
      ds = step;
      if (ds < 1e-15 * std::max(1.0, std::abs(before))) {
        throw Error(Errc::integration_failure, "step size underflow");
      }
    }
  }
}

double fd_second(const std::function<double(std::span<const double>)>& u, std::vector<double> x,
                 int i, int j, double d) {
  auto at = [&](double a, double b) {
    std::vector<double> y = x;
    y[i] += a;
    y[j] += b;
    return u(y);
  };
  if (i == j) {
    std::vector<double> yp = x;
    std::vector<double> ym = x;
    yp[i] += d;
    ym[i] -= d;
    return (u(yp) - 2.0 * u(x) + u(ym)) / (d * d);
  }
  return (at(d, d) - at(d, -d) - at(-d, d) + at(-d, -d)) / (4.0 * d * d);
}

void mirror(ODEProfile& prof) {
  const std::size_t m = prof.grid.size();
  ODEProfile out = prof;
  out.grid.clear();
  out.h.clear();
  out.h_prime.clear();
  out.h_double_prime.clear();
  for (std::size_t k = m; k-- > 1;) {
    out.grid.push_back(-prof.grid[k]);
    out.h.push_back(prof.h[k]);
    out.h_prime.push_back(-prof.h_prime[k]);
    out.h_double_prime.push_back(prof.h_double_prime[k]);
  }
  for (std::size_t k = 0; k < m; ++k) {
    out.grid.push_back(prof.grid[k]);
    out.h.push_back(prof.h[k]);
    out.h_prime.push_back(prof.h_prime[k]);
    out.h_double_prime.push_back(prof.h_double_prime[k]);
  }
  prof = std::move(out);
}

void record(ODEProfile& prof, double t, double h, double p) {
  if (!prof.grid.empty() && !(t > prof.grid.back())) return;
  prof.grid.push_back(t);
  prof.h.push_back(h);
  prof.h_prime.push_back(p);
  prof.h_double_prime.push_back(second_derivative(prof, t, h, p));
}

}  // namespace

namespace detail {

double pogorelov_constant_fd(int n, double delta) {
  if (n < 3) throw Error(Errc::unsupported_dimension, "the Pogorelov example needs n >= 3");
  const double alpha = pogorelov_alpha(n);
  // Test data h(t) = 1 + t^2 / 2 at t = 0.2, x' = (1, 0, ..., 0).
  const double t0 = 0.2;
  auto u = [&](std::span<const double> y) {
    double r2 = 0.0;
    for (int k = 0; k + 1 < n; ++k) r2 += y[k] * y[k];
    const double t = y[n - 1];
    return std::pow(r2, 0.5 * alpha) * (1.0 + 0.5 * t * t);
  };
  std::vector<double> x(n, 0.0);
  x[0] = 1.0;
  x[n - 1] = t0;

  Eigen::MatrixXd hess(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double d1 = fd_second(u, x, i, j, delta);
      const double d2 = fd_second(u, x, i, j, delta / 2);
      const double d4 = fd_second(u, x, i, j, delta / 4);
      const double r1 = (4.0 * d2 - d1) / 3.0;
      const double r2 = (4.0 * d4 - d2) / 3.0;
      hess(i, j) = hess(j, i) = (16.0 * r2 - r1) / 15.0;
    }
  }
  const double h = 1.0 + 0.5 * t0 * t0;
  const double hp = t0;
  const double hpp = 1.0;
  const double q = std::pow(h, n - 2.0) * (h * hpp - pogorelov_k(n) * hp * hp);
  return q / hess.determinant();
}

}  // namespace detail

double pogorelov_constant(int n) {
  if (n < 3) throw Error(Errc::unsupported_dimension, "the Pogorelov example needs n >= 3");
  static std::mutex mu;
  static std::map<int, double> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  const double c = detail::pogorelov_constant_fd(n, 0.02);
  cache.emplace(n, c);
  return c;
}

ODEProfile integrate_pogorelov(int n, const OdeConfig& cfg) {
  ODEProfile prof;
  prof.kind = ProfileKind::pogorelov;
  prof.n = n;
  prof.constant = pogorelov_constant(n);
  const double c = prof.constant;
  const double k = pogorelov_k(n);
  const double hb = cfg.blow_up_height;
  const double hs = std::min(cfg.switch_height, 0.5 * hb);

  long steps = 0;
  State x{1.0, 0.0};
  double t = 0.0;
  double dt = 1e-3;
  record(prof, 0.0, 1.0, 0.0);
  auto in_t = [&](const State& y, State& dy, double) {
    dy[0] = y[1];
    dy[1] = (c * std::pow(y[0], 2.0 - n) + k * y[1] * y[1]) / y[0];
  };
  auto stepper = odeint::make_controlled(cfg.atol, cfg.rtol, odeint::runge_kutta_dopri5<State>());
  while (x[0] < hs) {
    if (++steps > cfg.max_steps) throw Error(Errc::integration_failure, "step limit exceeded");
    if (stepper.try_step(in_t, x, t, dt) == odeint::success) {
      record(prof, t, x[0], x[1]);
    } else if (dt < 1e-15 * std::max(1.0, t)) {
      throw Error(Errc::integration_failure, "step size underflow");
    }
  }

  // Past the switch height h is the independent variable: y = (t, h').
  auto in_h = [&](const State& y, State& dy, double h) {
    dy[0] = 1.0 / y[1];
    dy[1] = (c * std::pow(h, 2.0 - n) + k * y[1] * y[1]) / (h * y[1]);
  };
  State y{t, x[1]};
  double h = x[0];
  double dh = 1e-3 * h;
  auto observe = [&](double hh, const State& s) { record(prof, s[0], hh, s[1]); };
  advance(in_h, y, h, 0.5 * hb, dh, cfg, steps, observe);
  const double t_half = y[0];
  advance(in_h, y, h, hb, dh, cfg, steps, observe);
  const double t_full = y[0];

  const double m = n / (n - 2.0);
  prof.blow_up_time = t_full + (t_full - t_half) / (std::pow(2.0, m) - 1.0);
  mirror(prof);
  return prof;
}

ODEProfile integrate_wang(const OdeConfig& cfg) {
  ODEProfile prof;
  prof.kind = ProfileKind::wang;
  long steps = 0;
  State x{1.0, 0.0};
  double t = 0.0;
  double dt = 1e-3;
  record(prof, 0.0, 1.0, 0.0);
  auto sys = [](const State& y, State& dy, double s) {
    dy[0] = y[1];
    dy[1] = wang_hpp(s, y[0], y[1]);
  };
  advance(sys, x, t, 1.0, dt, cfg, steps, [&](double s, const State& y) { record(prof, s, y[0], y[1]); });
  mirror(prof);
  return prof;
}

std::array<double, 3> profile_at(const ODEProfile& prof, double t) {
  if (prof.grid.empty()) throw Error(Errc::invalid_input, "empty profile");
  const double s = std::abs(t);
  const double end = prof.grid.back();
  if (s > end * (1.0 + 1e-14)) throw Error(Errc::outside_domain, "point lies beyond the computed profile");
  auto it = std::lower_bound(prof.grid.begin(), prof.grid.end(), s);
  std::size_t k = static_cast<std::size_t>(it - prof.grid.begin());
  if (k == prof.grid.size()) --k;
  if (k > 0 && s - prof.grid[k - 1] < prof.grid[k] - s) --k;

  State x{prof.h[k], prof.h_prime[k]};
  double u = prof.grid[k];
  if (u != s) {
    OdeConfig cfg;
    cfg.rtol = 1e-13;
    cfg.atol = 1e-15;
    long steps = 0;
    auto sys = [&](const State& y, State& dy, double tt) {
      dy[0] = y[1];
      dy[1] = second_derivative(prof, tt, y[0], y[1]);
    };
    const double span = std::abs(s - u);
    double ds = std::max(span, 1e-16);
    if (s > u) {
      advance(sys, x, u, s, ds, cfg, steps, [](double, const State&) {});
    } else {
      // Backwards: integrate the reversed system in r = -t.
      auto rev = [&](const State& y, State& dy, double r) {
        dy[0] = -y[1];
        dy[1] = -second_derivative(prof, -r, y[0], y[1]);
      };
      double r = -u;
      advance(rev, x, r, -s, ds, cfg, steps, [](double, const State&) {});
    }
  }
  const double sign = t < 0.0 ? -1.0 : 1.0;
  return {x[0], sign * x[1], second_derivative(prof, s, x[0], x[1])};
}

PointEval pogorelov_eval(int n, const ODEProfile& prof, std::span<const double> x) {
  if (prof.kind != ProfileKind::pogorelov || prof.n != n) {
    throw Error(Errc::invalid_input, "profile does not belong to the Pogorelov example in this dimension");
  }
  if (x.size() != static_cast<std::size_t>(n)) throw Error(Errc::invalid_input, "point has the wrong dimension");
  const double t = x[n - 1];
  if (prof.blow_up_time && std::abs(t) >= *prof.blow_up_time) {
    throw Error(Errc::outside_domain, "|x_n| is at or beyond the blow-up time");
  }
  double r2 = 0.0;
  for (int k = 0; k + 1 < n; ++k) r2 += x[k] * x[k];
  const double r = std::sqrt(r2);
  if (!(r > 0.0)) throw Error(Errc::singular_point, "the Hessian is singular on the axis x' = 0");

  const auto [h, hp, hpp] = profile_at(prof, t);
  const double a = pogorelov_alpha(n);
  const double ra = std::pow(r, a);

  PointEval e;
  e.value = ra * h;
  e.gradient.assign(n, 0.0);
  for (int k = 0; k + 1 < n; ++k) e.gradient[k] = a * ra / r2 * h * x[k];
  e.gradient[n - 1] = ra * hp;

  e.hessian = SymMatrix(n);
  const double tang = a * ra / r2 * h;
  const double rad = a * (a - 1.0) * ra / r2 * h;
  for (int i = 0; i + 1 < n; ++i) {
    for (int j = i; j + 1 < n; ++j) {
      const double xx = x[i] * x[j] / r2;
      e.hessian.set(i, j, tang * ((i == j ? 1.0 : 0.0) - xx) + rad * xx);
    }
    e.hessian.set(i, n - 1, a * ra / r2 * hp * x[i]);
  }
  e.hessian.set(n - 1, n - 1, ra * hpp);
  e.det_residual = std::abs(e.hessian.to_eigen().determinant() - 1.0);
  return e;
}

double pogorelov_hessian_norm_integral(const ODEProfile& prof, double p, double r_inner, double r_outer,
                                       double t_half) {
  if (prof.kind != ProfileKind::pogorelov || prof.n != 3) {
    throw Error(Errc::invalid_input, "needs a Pogorelov profile for n = 3");
  }
  if (!(r_inner > 0.0) || !(r_outer > r_inner) || !(t_half > 0.0)) {
    throw Error(Errc::invalid_input, "annulus needs 0 < r_inner < r_outer and t_half > 0");
  }
  using Gauss = boost::math::quadrature::gauss<double, 30>;
  const int n = 3;
  const double a = pogorelov_alpha(n);
  double total = 0.0;
  // Tensor Gauss rule: t nodes on [-t_half, t_half], panels of width 1 in log r.
  const double lo = std::log(r_inner);
  const double hi = std::log(r_outer);
  const int panels = std::max(1, static_cast<int>(std::ceil(hi - lo)));
  auto by_t = [&](double t) {
    const auto [h, hp, hpp] = profile_at(prof, t);
    auto f = [&](double s) {
      const double r = std::exp(s);
      const double ra = std::pow(r, a);
      const double e1 = a * ra / (r * r) * h;
      const double e2 = a * (a - 1.0) * ra / (r * r) * h;
      const double e3 = a * ra / r * hp;
      const double e4 = ra * hpp;
      const double frob2 = (n - 2) * e1 * e1 + e2 * e2 + 2.0 * e3 * e3 + e4 * e4;
      return std::pow(frob2, 0.5 * p) * 2.0 * std::numbers::pi * r * r;
    };
    double sum = 0.0;
    for (int k = 0; k < panels; ++k) {
      const double s0 = lo + (hi - lo) * k / panels;
      const double s1 = lo + (hi - lo) * (k + 1) / panels;
      sum += Gauss::integrate(f, s0, s1);
    }
    return sum;
  };
  total = Gauss::integrate(by_t, -t_half, t_half);
  return total;
}

PointEval wang_eval(const ODEProfile& prof, double x1, double x2) {
  if (prof.kind != ProfileKind::wang) throw Error(Errc::invalid_input, "profile does not belong to the Wang example");
  if (!(x2 > 0.0) || x1 * x1 > x2 * (1.0 + 1e-12)) {
    throw Error(Errc::outside_domain, "point is outside { x1^2 <= x2 }");
  }
  const double q = std::sqrt(x2);
  const double s = std::clamp(x1 / q, -1.0, 1.0);
  const auto [h, hp, hpp] = profile_at(prof, s);

  PointEval e;
  e.value = x2 * q * h;
  e.gradient = {x2 * hp, q * (1.5 * h - 0.5 * s * hp)};
  e.hessian = SymMatrix(2);
  e.hessian.set(0, 0, q * hpp);
  e.hessian.set(0, 1, hp - 0.5 * s * hpp);
  e.hessian.set(1, 1, (0.75 * h - 0.75 * s * hp + 0.25 * s * s * hpp) / q);
  const double det = e.hessian(0, 0) * e.hessian(1, 1) - e.hessian(0, 1) * e.hessian(0, 1);
  e.det_residual = std::abs(det - 1.0);
  return e;
}

double ode_residual(const ODEProfile& prof) {
  double worst = 0.0;
  for (std::size_t j = 0; j < prof.grid.size(); ++j) {
    const double t = prof.grid[j];
    const double h = prof.h[j];
    const double p = prof.h_prime[j];
    const double q = prof.h_double_prime[j];
    double res;
    if (prof.kind == ProfileKind::pogorelov) {
      const int n = prof.n;
      const double k = pogorelov_k(n);
      const double hn = std::pow(h, n - 2.0);
      const double lhs = hn * (h * q - k * p * p);
      res = std::abs(lhs - prof.constant) / (hn * (h * std::abs(q) + k * p * p) + prof.constant);
    } else {
      const double lhs = 0.25 * q * (3.0 * h + t * p) - p * p;
      res = std::abs(lhs - 1.0) / (std::abs(0.25 * q * (3.0 * h + t * p)) + p * p + 1.0);
    }
    worst = std::max(worst, res);
  }
  return worst;
}

double pogorelov_first_integral_defect(const ODEProfile& prof, double h_min) {
  if (prof.kind != ProfileKind::pogorelov) throw Error(Errc::invalid_input, "needs a Pogorelov profile");
  const int n = prof.n;
  const double k = pogorelov_k(n);
  const double scale = 2.0 * prof.constant / (n + 2.0 * k - 2.0);
  double worst = 0.0;
  for (std::size_t j = 0; j < prof.grid.size(); ++j) {
    const double h = prof.h[j];
    if (h - 1.0 < h_min) continue;
    const double l = std::log(h);
    // h^{2k} - h^{2-n} = h^{2-n} (e^{(2k+n-2) l} - 1)
    const double w = scale * std::exp((2.0 - n) * l) * std::expm1((2.0 * k + n - 2.0) * l);
    const double p2 = prof.h_prime[j] * prof.h_prime[j];
    worst = std::max(worst, std::abs(p2 - w) / w);
  }
  return worst;
}

double fit_power_exponent(std::span<const std::pair<double, double>> samples) {
  if (samples.size() < 3) throw Error(Errc::invalid_sample, "at least 3 samples are needed");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& [t, y] : samples) {
    if (!(t > 0.0) || !(y > 0.0) || !std::isfinite(t) || !std::isfinite(y)) {
      throw Error(Errc::invalid_sample, "samples must be finite and strictly positive");
    }
    const double lx = std::log(t);
    const double ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double m = static_cast<double>(samples.size());
  const double den = m * sxx - sx * sx;
  if (!(std::abs(den) > 0.0)) throw Error(Errc::invalid_sample, "sample abscissae are all equal");
  return (m * sxy - sx * sy) / den;
}

}  // namespace mongeampere
