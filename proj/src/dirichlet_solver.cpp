#include "mongeampere/dirichlet_solver.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "mongeampere/error.hpp"

namespace mongeampere {

namespace {

struct AreaPoint {
  double z = 0.0;
  double area = 0.0;
  double slope = 0.0;  // d area / d z, <= 0
};

AreaPoint area_at(detail::CellEngine& engine, std::size_t i, double z) {
  const detail::TaggedPolygon t = engine.cell(i, z);
  AreaPoint p{z, t.area(), 0.0};
  if (t.kind != Region::Kind::bounded) return p;
  // Lowering z pushes every supporting line outward at unit rate in offset,
  // i.e. by 1/|x_w - x_i| in distance.
  const std::size_t m = t.vertices.size();
  const Vec2 xi = engine.positions()[i];
  for (std::size_t k = 0; k < m; ++k) {
    const int w = t.edge_tags[k];
    if (w < 0) continue;
    const double len = norm(t.vertices[(k + 1) % m] - t.vertices[k]);
    p.slope -= len / norm(engine.positions()[w] - xi);
  }
  return p;
}

struct NodeContext {
  double dist = 0.0;
  double diam = 0.0;
  double budget = 0.0;
  double atol = 0.0;
  double ztol = 0.0;
};

// Root of area(z) = target. sqrt(area) is concave in z (the cells at two
// heights average into the cell at the average height), so a Newton step on
// sqrt(area) - sqrt(target) from either side lands at or above the root.
double solve_node(detail::CellEngine& engine, std::size_t i, double target, const NodeContext& ctx,
                  std::optional<double> start) {
  if (target <= 0.0) return engine.others_support(i).value;

  std::optional<AreaPoint> up;
  std::optional<AreaPoint> dn;
  AreaPoint last;
  if (start) {
    last = area_at(engine, i, *start);
    if (std::abs(last.area - target) <= ctx.atol) return *start;
    if (last.area > 0.0) (last.area < target ? up : dn) = last;
  }
  // The top of the bracket (zero mass) is only needed when no warm start
  // below it is available.
  std::optional<double> top;
  auto top_value = [&] {
    if (!top) top = engine.others_support(i).value;
    return *top;
  };
  if (!up) {
    up = AreaPoint{top_value(), 0.0, 0.0};
    if (!dn) last = *up;
  }
  const double sqrt_t = std::sqrt(target);

  for (int iter = 0; iter < 200; ++iter) {
    double z = 0.0;
    bool newton = false;
    if (last.area > 0.0 && last.slope < 0.0) {
      const double s = std::sqrt(last.area);
      z = last.z - 2.0 * s * (s - sqrt_t) / last.slope;
      newton = std::isfinite(z) && z < up->z && (!dn || z > dn->z);
    }
    if (!newton) {
      if (!dn) {
        z = top_value() - std::sqrt(ctx.budget * ctx.dist * ctx.diam);
        last = area_at(engine, i, z);
        if (last.area < target * (1.0 - 1e-9) - ctx.atol) {
          throw Error(Errc::infeasible_mass, "node " + std::to_string(i) + " cannot reach mass " +
                                                 std::to_string(target) + " inside the Alexandrov bracket");
        }
        if (std::abs(last.area - target) <= ctx.atol) return z;
        dn = last;
        continue;
      }
      z = 0.5 * (up->z + dn->z);
    }
    last = area_at(engine, i, z);
    if (std::abs(last.area - target) <= ctx.atol) return z;
    (last.area < target ? up : dn) = last;
    if (dn && up->z - dn->z <= ctx.ztol * (1.0 + std::abs(up->z))) return up->z;
  }
  return up->z;
}

NodeContext make_context(const ConvexPolygon& domain, Vec2 x, double budget, double scale, const SolverConfig& cfg) {
  NodeContext ctx;
  ctx.dist = domain.boundary_distance(x);
  ctx.diam = domain.diameter();
  ctx.budget = budget;
  ctx.atol = 1e-2 * cfg.mass_tolerance * std::max(1.0, scale);
  ctx.ztol = cfg.bisection_tolerance;
  return ctx;
}

void check_config(const SolverConfig& cfg) {
  if (!(cfg.mass_tolerance > 0.0) || !(cfg.bisection_tolerance > 0.0) || cfg.max_sweeps < 1) {
    throw Error(Errc::invalid_input, "solver tolerances must be positive and max_sweeps >= 1");
  }
}

std::vector<double> cell_areas(detail::CellEngine& engine, Execution exec) {
  const std::size_t n = engine.node_count();
  std::vector<double> out(n, 0.0);
  if (exec == Execution::sequential || n < 2) {
    for (std::size_t i = 0; i < n; ++i) out[i] = engine.cell(i).area();
    return out;
  }
  const std::size_t workers = std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), n);
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) out[i] = engine.cell(i).area();
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace

void validate(const DiracProblem& p) {
  if (p.target_masses.size() != p.nodes.size()) throw Error(Errc::invalid_input, "one target mass per node required");
  for (double a : p.target_masses) {
    if (!std::isfinite(a) || a < 0.0) throw Error(Errc::invalid_input, "target masses must be finite and >= 0");
  }
  NodalConvexFunction(p.domain, p.boundary, p.nodes, std::vector<double>(p.nodes.size(), 0.0));
}

double mass_residual(std::span<const double> achieved, std::span<const double> target) {
  double scale = 1.0;
  for (double a : target) scale = std::max(scale, a);
  double r = 0.0;
  for (std::size_t i = 0; i < achieved.size(); ++i) r = std::max(r, std::abs(achieved[i] - target[i]));
  return r / scale;
}

double update_height(const NodalConvexFunction& f, std::size_t i, double target, const SolverConfig& config,
                     std::optional<double> mass_budget) {
  check_config(config);
  if (i >= f.node_count()) throw Error(Errc::invalid_input, "node index out of range");
  if (!std::isfinite(target) || target < 0.0) throw Error(Errc::invalid_input, "target mass must be >= 0");
  detail::CellEngine engine(f);
  const NodeContext ctx = make_context(f.domain(), f.nodes()[i], mass_budget.value_or(target), target, config);
  return solve_node(engine, i, target, ctx, std::nullopt);
}

SolveReport solve_dirac(const DiracProblem& problem, const SolverConfig& config) {
  check_config(config);
  validate(problem);
  const std::size_t n = problem.nodes.size();
  const std::span<const double> alpha = problem.target_masses;

  NodalConvexFunction f = convex_envelope(problem.domain, problem.boundary, problem.nodes);
  detail::CellEngine engine(f);

  double budget = 0.0;
  double scale = 1.0;
  for (double a : alpha) {
    budget += a;
    scale = std::max(scale, a);
  }
  std::vector<NodeContext> ctx;
  ctx.reserve(n);
  for (std::size_t i = 0; i < n; ++i) ctx.push_back(make_context(problem.domain, problem.nodes[i], budget, scale, config));

  SolveReport report{f, {}, 0, 0.0, false};
  int sweep = 0;
  for (;; ++sweep) {
    if (config.on_sweep) config.on_sweep(sweep, engine.heights());
    report.achieved_masses = cell_areas(engine, config.execution);
    report.final_mass_residual = mass_residual(report.achieved_masses, alpha);
    if (report.final_mass_residual <= config.mass_tolerance) {
      report.converged = true;
      break;
    }
    if (sweep == config.max_sweeps) break;

    if (config.mode == SweepMode::gauss_seidel) {
      for (std::size_t i = 0; i < n; ++i) {
        const double z = solve_node(engine, i, alpha[i], ctx[i], engine.height(i));
        engine.set_height(i, std::min(engine.height(i), z));
      }
    } else {
      std::vector<double> next(n);
      auto work = [&](std::size_t i) { next[i] = solve_node(engine, i, alpha[i], ctx[i], engine.height(i)); };
      if (config.execution == Execution::parallel && n > 1) {
        const std::size_t workers = std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), n);
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(workers);
        for (std::size_t w = 0; w < workers; ++w) {
          pool.emplace_back([&, w] {
            try {
              for (std::size_t i = w; i < n; i += workers) work(i);
            } catch (...) {
              errors[w] = std::current_exception();
            }
          });
        }
        for (auto& t : pool) t.join();
        for (auto& e : errors) {
          if (e) std::rethrow_exception(e);
        }
      } else {
        for (std::size_t i = 0; i < n; ++i) work(i);
      }
      for (std::size_t i = 0; i < n; ++i) engine.set_height(i, std::min(engine.height(i), next[i]));
    }
  }
  report.sweeps_used = sweep;
  std::vector<double> heights(engine.heights().begin(), engine.heights().end());
  report.solution = f.with_heights(std::move(heights));
  return report;
}

std::vector<double> discretize_density(const ConvexPolygon& domain, const std::function<double(Vec2)>& density,
                                       std::span<const Vec2> nodes) {
  const std::size_t n = nodes.size();
  std::vector<double> masses(n, 0.0);
  if (n == 0) return masses;
  for (Vec2 x : nodes) {
    if (!domain.strictly_contains(x)) throw Error(Errc::invalid_input, "node is not strictly inside the domain");
  }
  const double h = std::sqrt(domain.area() / static_cast<double>(n)) / 4.0;
  const std::vector<HalfPlane> walls = domain.halfplanes();

  for (std::size_t i = 0; i < n; ++i) {
    std::vector<HalfPlane> planes = walls;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const Vec2 d = nodes[j] - nodes[i];
      if (max_abs(d) <= kGeomEps * (1.0 + domain.scale())) throw Error(Errc::invalid_input, "coincident nodes");
      planes.push_back({d, 0.5 * (dot(nodes[j], nodes[j]) - dot(nodes[i], nodes[i]))});
    }
    const Region cell = halfplane_intersection(planes);
    if (!cell.is_bounded()) continue;
    const ConvexPolygon& poly = cell.polygon();

    Vec2 lo = poly.vertex(0);
    Vec2 hi = lo;
    for (Vec2 v : poly.vertices()) {
      lo = {std::min(lo.x, v.x), std::min(lo.y, v.y)};
      hi = {std::max(hi.x, v.x), std::max(hi.y, v.y)};
    }
    // Grid anchored at the origin so neighbouring cells share grid lines.
    const long ix0 = static_cast<long>(std::floor(lo.x / h));
    const long ix1 = static_cast<long>(std::ceil(hi.x / h));
    const long iy0 = static_cast<long>(std::floor(lo.y / h));
    const long iy1 = static_cast<long>(std::ceil(hi.y / h));
    double mass = 0.0;
    for (long ix = ix0; ix < ix1; ++ix) {
      for (long iy = iy0; iy < iy1; ++iy) {
        const Vec2 a{ix * h, iy * h};
        const Vec2 b{(ix + 1) * h, (iy + 1) * h};
        const ConvexPolygon square({a, {b.x, a.y}, b, {a.x, b.y}});
        if (poly.contains(a, 0.0) && poly.contains(b, 0.0) && poly.contains({a.x, b.y}, 0.0) &&
            poly.contains({b.x, a.y}, 0.0)) {
          mass += h * h * density((a + b) * 0.5);
          continue;
        }
        const Region piece = intersect(square, poly);
        if (!piece.is_bounded()) continue;
        mass += piece.area() * density(piece.polygon().centroid());
      }
    }
    masses[i] = mass;
  }
  return masses;
}

}  // namespace mongeampere
