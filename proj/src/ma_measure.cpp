#include "mongeampere/ma_measure.hpp"

#include <algorithm>
#include <thread>

#include "mongeampere/error.hpp"

namespace mongeampere {

namespace {

constexpr double kSampleTol = 1e-12;

HalfPlane constraint(Vec2 xi, double zi, Vec2 xw, double fw) { return {xw - xi, fw - zi}; }

bool violates(const HalfPlane& h, Vec2 v) {
  const double s = dot(h.normal, v) - h.offset;
  if (s <= 0.0) return false;
  return s > kGeomEps * (norm(h.normal) * (1.0 + max_abs(v)) + std::abs(h.offset));
}

Region to_region(detail::TaggedPolygon t) {
  switch (t.kind) {
    case Region::Kind::empty: return Region::empty();
    case Region::Kind::unbounded: return Region::unbounded();
    case Region::Kind::degenerate: return Region::degenerate(std::move(t.vertices));
    case Region::Kind::bounded: return Region::bounded(ConvexPolygon(std::move(t.vertices)));
  }
  return Region::empty();
}

template <class Fn>
void for_each_index(std::size_t n, Execution exec, Fn&& fn) {
  const std::size_t workers =
      exec == Execution::parallel ? std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), n) : 1;
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

// ------------------------------------------------------------ NodalConvexFunction

NodalConvexFunction::NodalConvexFunction(ConvexPolygon domain, std::vector<BoundarySample> boundary,
                                         std::vector<Vec2> nodes, std::vector<double> heights)
    : heights_(std::move(heights)) {
  auto g = std::make_shared<Geometry>(Geometry{std::move(domain), std::move(boundary), std::move(nodes), {}, {}});
  const ConvexPolygon& dom = g->domain;
  const double sc = 1.0 + dom.scale();

  if (heights_.size() != g->nodes.size()) throw Error(Errc::invalid_input, "one height per node required");
  for (double z : heights_) {
    if (!std::isfinite(z)) throw Error(Errc::invalid_input, "non-finite node height");
  }
  for (std::size_t i = 0; i < g->nodes.size(); ++i) {
    const Vec2 x = g->nodes[i];
    if (!std::isfinite(x.x) || !std::isfinite(x.y) || !dom.strictly_contains(x)) {
      throw Error(Errc::invalid_input, "node " + std::to_string(i) + " is not strictly inside the domain");
    }
  }
  {
    std::vector<std::size_t> order(g->nodes.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const Vec2 p = g->nodes[a];
      const Vec2 q = g->nodes[b];
      return p.x < q.x || (p.x == q.x && p.y < q.y);
    });
    // Any two points within the tolerance are adjacent in x-order up to a
    // window, so a short forward scan suffices.
    for (std::size_t a = 0; a < order.size(); ++a) {
      for (std::size_t b = a + 1; b < order.size(); ++b) {
        const Vec2 p = g->nodes[order[a]];
        const Vec2 q = g->nodes[order[b]];
        if (q.x - p.x > kGeomEps * sc) break;
        if (max_abs(p - q) <= kGeomEps * sc) throw Error(Errc::invalid_input, "coincident nodes");
      }
    }
  }

  for (const BoundarySample& s : g->boundary) {
    if (!std::isfinite(s.point.x) || !std::isfinite(s.point.y) || !std::isfinite(s.value)) {
      throw Error(Errc::invalid_input, "non-finite boundary sample");
    }
    if (dom.edge_containing(s.point, kSampleTol) < 0) {
      throw Error(Errc::invalid_input, "boundary sample is not on the domain boundary");
    }
  }
  for (std::size_t a = 0; a < g->boundary.size(); ++a) {
    for (std::size_t b = a + 1; b < g->boundary.size(); ++b) {
      if (max_abs(g->boundary[a].point - g->boundary[b].point) <= kGeomEps * sc) {
        throw Error(Errc::invalid_input, "duplicate boundary samples");
      }
    }
  }

  const int nn = static_cast<int>(g->nodes.size());
  g->positions = g->nodes;
  for (const BoundarySample& s : g->boundary) g->positions.push_back(s.point);
  for (Vec2 v : dom.vertices()) {
    int found = -1;
    for (std::size_t k = 0; k < g->boundary.size(); ++k) {
      if (max_abs(g->boundary[k].point - v) <= kSampleTol * sc) {
        found = nn + static_cast<int>(k);
        break;
      }
    }
    if (found < 0) throw Error(Errc::invalid_input, "boundary samples must include every domain vertex");
    g->ring.push_back(found);
  }
  geometry_ = std::move(g);
}

NodalConvexFunction NodalConvexFunction::with_heights(std::vector<double> heights) const {
  if (heights.size() != geometry_->nodes.size()) throw Error(Errc::invalid_input, "one height per node required");
  for (double z : heights) {
    if (!std::isfinite(z)) throw Error(Errc::invalid_input, "non-finite node height");
  }
  return NodalConvexFunction(geometry_, std::move(heights));
}

std::vector<double> NodalConvexFunction::lifted_values() const {
  std::vector<double> v = heights_;
  for (const BoundarySample& s : geometry_->boundary) v.push_back(s.value);
  return v;
}

// -------------------------------------------------------------------- CellEngine

namespace detail {

CellEngine::CellEngine(const NodalConvexFunction& f)
    : node_count_(f.node_count()),
      positions_(f.lifted_positions().begin(), f.lifted_positions().end()),
      values_(f.lifted_values()),
      ring_(f.vertex_ring().begin(), f.vertex_ring().end()),
      active_(f.node_count()),
      basis_(f.node_count(), std::array<int, 3>{-1, -1, -1}),
      hint_(f.node_count()) {}

TaggedPolygon CellEngine::cell_from(std::size_t i, double z, std::span<const int> candidates,
                                    std::optional<ClipBox> hint) const {
  std::vector<HalfPlane> planes;
  planes.reserve(candidates.size());
  for (int w : candidates) planes.push_back(constraint(positions_[i], z, positions_[w], values_[w]));
  return clip_halfplanes(planes, candidates, hint);
}

TaggedPolygon CellEngine::cell(std::size_t i, double z) {
  const int n = static_cast<int>(positions_.size());
  const int self = static_cast<int>(i);
  std::vector<int> candidates;
  std::vector<char> in_set(n, 0);
  auto add = [&](int w) {
    if (w != self && !in_set[w]) {
      in_set[w] = 1;
      candidates.push_back(w);
    }
  };
  bool ring_added = false;
  if (active_[i].empty()) {
    for (int w = 0; w < n; ++w) add(w);
  } else {
    for (int w : active_[i]) add(w);
  }

  for (;;) {
    TaggedPolygon t = cell_from(i, z, candidates, hint_[i]);
    if (t.kind == Region::Kind::empty) return t;
    if (t.kind == Region::Kind::unbounded) {
      if (static_cast<int>(candidates.size()) == n - 1) {
        throw Error(Errc::unbounded_cell, "subgradient cell of node " + std::to_string(i) + " is unbounded");
      }
      if (!ring_added) {
        for (int w : ring_) add(w);
        ring_added = true;
      } else {
        for (int w = 0; w < n; ++w) add(w);
      }
      continue;
    }
    bool added = false;
    for (int w = 0; w < n; ++w) {
      if (w == self || in_set[w]) continue;
      const HalfPlane h = constraint(positions_[i], z, positions_[w], values_[w]);
      for (Vec2 v : t.vertices) {
        if (violates(h, v)) {
          add(w);
          added = true;
          break;
        }
      }
    }
    if (added) continue;
    if (t.kind == Region::Kind::bounded) {
      std::vector<int> act;
      for (int tag : t.edge_tags) {
        if (tag >= 0 && std::find(act.begin(), act.end(), tag) == act.end()) act.push_back(tag);
      }
      active_[i] = std::move(act);
      // Next query: twice the bounding square, which absorbs moderate height changes.
      Vec2 lo = t.vertices.front();
      Vec2 hi = lo;
      for (Vec2 v : t.vertices) {
        lo = {std::min(lo.x, v.x), std::min(lo.y, v.y)};
        hi = {std::max(hi.x, v.x), std::max(hi.y, v.y)};
      }
      hint_[i] = ClipBox{(lo + hi) * 0.5, std::max(hi.x - lo.x, hi.y - lo.y) + 1e-9 * (1.0 + max_abs(hi))};
    }
    return t;
  }
}

HullSupport CellEngine::others_support(std::size_t i) {
  std::array<int, 3> start = basis_[i];
  if (start[0] < 0) start = fan_triangle(positions_, ring_, positions_[i]);
  HullSupport s = lower_hull_support(positions_, values_, positions_[i], start, static_cast<int>(i));
  basis_[i] = s.basis;
  return s;
}

}  // namespace detail

// -------------------------------------------------------------------- operations

Region subgradient_cell(const NodalConvexFunction& f, std::size_t i) {
  if (i >= f.node_count()) throw Error(Errc::invalid_input, "node index out of range");
  detail::CellEngine engine(f);
  return to_region(engine.cell(i));
}

MAMeasure ma_masses(const NodalConvexFunction& f, Execution exec) {
  detail::CellEngine engine(f);
  MAMeasure m;
  m.masses.assign(f.node_count(), 0.0);
  for_each_index(f.node_count(), exec, [&](std::size_t i) { m.masses[i] = engine.cell(i).area(); });
  for (double a : m.masses) m.total += a;
  return m;
}

double evaluate(const NodalConvexFunction& f, Vec2 x) {
  if (!f.domain().contains(x)) throw Error(Errc::outside_domain, "evaluation point is outside the domain");
  const auto pos = f.lifted_positions();
  const std::vector<double> val = f.lifted_values();
  return lower_hull_support(pos, val, x, fan_triangle(pos, f.vertex_ring(), x)).value;
}

NodalConvexFunction convex_envelope(ConvexPolygon domain, std::vector<BoundarySample> boundary,
                                    std::vector<Vec2> nodes) {
  NodalConvexFunction probe(domain, boundary, nodes, std::vector<double>(nodes.size(), 0.0));
  const int nn = static_cast<int>(nodes.size());
  std::vector<Vec2> pos;
  std::vector<double> val;
  for (const BoundarySample& s : boundary) {
    pos.push_back(s.point);
    val.push_back(s.value);
  }
  std::vector<int> ring;
  for (int r : probe.vertex_ring()) ring.push_back(r - nn);

  std::vector<double> heights(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    heights[i] = lower_hull_support(pos, val, nodes[i], fan_triangle(pos, ring, nodes[i])).value;
  }
  return probe.with_heights(std::move(heights));
}

std::vector<BoundarySample> sample_boundary(const ConvexPolygon& domain, const std::function<double(Vec2)>& phi,
                                            int per_edge) {
  if (per_edge < 1) throw Error(Errc::invalid_input, "at least one sample per edge required");
  std::vector<BoundarySample> out;
  const std::size_t n = domain.size();
  out.reserve(n * static_cast<std::size_t>(per_edge));
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2 a = domain.vertex(k);
    const Vec2 b = domain.vertex(k + 1);
    for (int j = 0; j < per_edge; ++j) {
      const double t = static_cast<double>(j) / per_edge;
      const Vec2 p = j == 0 ? a : a + (b - a) * t;
      out.push_back({p, phi(p)});
    }
  }
  return out;
}

}  // namespace mongeampere
