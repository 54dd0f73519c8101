#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "mongeampere/convex_geom.hpp"
#include "mongeampere/ma_measure.hpp"

namespace mongeampere {

/// Mu = sum_i alpha_i delta_{x_i} in the domain, u = boundary data on its boundary.
struct DiracProblem {
  ConvexPolygon domain;
  std::vector<BoundarySample> boundary;
  std::vector<Vec2> nodes;
  std::vector<double> target_masses;
};

/// Throws Error{Errc::invalid_input} unless the problem is well formed.
void validate(const DiracProblem& problem);

enum class SweepMode { gauss_seidel, jacobi };

struct SolverConfig {
  double mass_tolerance = 1e-8;
  int max_sweeps = 500;
  /// Height bracket width at which a single node update gives up refining.
  double bisection_tolerance = 1e-14;
  SweepMode mode = SweepMode::gauss_seidel;
  Execution execution = Execution::sequential;
  /// Called before every sweep (and once after the last) with the current heights.
  std::function<void(int sweep, std::span<const double> heights)> on_sweep;
};

struct SolveReport {
  NodalConvexFunction solution;
  std::vector<double> achieved_masses;
  int sweeps_used = 0;
  double final_mass_residual = 0.0;
  bool converged = false;
};

/// Monotone vertex lowering from the convex envelope of the boundary data.
/// Each node in turn is lowered until its cell has the target area; heights
/// never increase. Throws Error{Errc::infeasible_mass} if a node cannot reach
/// its target inside the Alexandrov bracket.
SolveReport solve_dirac(const DiracProblem& problem, const SolverConfig& config = {});

/// Height of node i giving its cell area `target`, all other heights fixed.
/// The search bracket is [hi - sqrt(budget * dist(x_i) * diam), hi] where hi is
/// the hull of the other lifted points at x_i; `mass_budget` defaults to
/// `target`.
double update_height(const NodalConvexFunction& f, std::size_t i, double target, const SolverConfig& config = {},
                     std::optional<double> mass_budget = std::nullopt);

/// Masses alpha_i = integral of `density` over (Voronoi cell of node i) cut to
/// the domain. Cells are exact; the integral uses the centroid rule on the
/// pieces of a square grid of spacing sqrt(|domain| / nodes) / 4, which is exact
/// for affine densities.
std::vector<double> discretize_density(const ConvexPolygon& domain, const std::function<double(Vec2)>& density,
                                       std::span<const Vec2> nodes);

/// max_i |achieved_i - target_i| / max(1, max_i target_i).
double mass_residual(std::span<const double> achieved, std::span<const double> target);

}  // namespace mongeampere
