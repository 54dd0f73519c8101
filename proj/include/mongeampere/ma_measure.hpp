#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "mongeampere/convex_geom.hpp"
#include "mongeampere/lower_hull.hpp"

namespace mongeampere {

struct BoundarySample {
  Vec2 point;
  double value = 0.0;
};

/// Convex piecewise-linear function on a convex polygon: the lower convex hull
/// of the lifted interior nodes (x_i, z_i) and lifted boundary samples
/// (y_k, phi_k). The samples are the boundary data; nothing between them is
/// assumed beyond linear interpolation by the hull.
///
/// Construction checks that samples lie on the boundary and include every
/// domain vertex, that nodes are strictly interior and pairwise distinct, and
/// that there is one finite height per node (Errc::invalid_input otherwise).
class NodalConvexFunction {
 public:
  NodalConvexFunction(ConvexPolygon domain, std::vector<BoundarySample> boundary, std::vector<Vec2> nodes,
                      std::vector<double> heights);

  const ConvexPolygon& domain() const { return geometry_->domain; }
  std::span<const BoundarySample> boundary_samples() const { return geometry_->boundary; }
  std::span<const Vec2> nodes() const { return geometry_->nodes; }
  std::span<const double> heights() const { return heights_; }
  std::size_t node_count() const { return geometry_->nodes.size(); }

  /// Same geometry and boundary data, new node heights.
  NodalConvexFunction with_heights(std::vector<double> heights) const;

  /// Positions of all lifted points: nodes first, then boundary samples.
  std::span<const Vec2> lifted_positions() const { return geometry_->positions; }
  /// Values parallel to lifted_positions().
  std::vector<double> lifted_values() const;
  /// Lifted-point indices of the samples at the domain vertices, counter-clockwise.
  std::span<const int> vertex_ring() const { return geometry_->ring; }

 private:
  struct Geometry {
    ConvexPolygon domain;
    std::vector<BoundarySample> boundary;
    std::vector<Vec2> nodes;
    std::vector<Vec2> positions;
    std::vector<int> ring;
  };

  NodalConvexFunction(std::shared_ptr<const Geometry> g, std::vector<double> heights)
      : geometry_(std::move(g)), heights_(std::move(heights)) {}

  std::shared_ptr<const Geometry> geometry_;
  std::vector<double> heights_;
};

struct MAMeasure {
  std::vector<double> masses;
  double total = 0.0;
};

enum class Execution { sequential, parallel };

/// Subgradients at node i: { p : p . (w - x_i) <= f(w) - z_i } over every other
/// lifted point w. Empty or degenerate for nodes that are not hull vertices.
/// Throws Error{Errc::unbounded_cell} if the constraints do not bound the cell.
Region subgradient_cell(const NodalConvexFunction& f, std::size_t i);

/// Monge-Ampere mass of every node (area of its subgradient cell). The result
/// does not depend on `exec`.
MAMeasure ma_masses(const NodalConvexFunction& f, Execution exec = Execution::sequential);

/// Value of the lower hull at x. Throws Error{Errc::outside_domain}.
double evaluate(const NodalConvexFunction& f, Vec2 x);

/// Heights set to the hull of the boundary samples alone, so every node sits on
/// the envelope of the boundary data and carries no mass.
NodalConvexFunction convex_envelope(ConvexPolygon domain, std::vector<BoundarySample> boundary,
                                    std::vector<Vec2> nodes);

/// `per_edge` equally spaced samples on each edge, starting at its first vertex.
std::vector<BoundarySample> sample_boundary(const ConvexPolygon& domain, const std::function<double(Vec2)>& phi,
                                            int per_edge);

namespace detail {

/// Mutable working copy of a nodal function for repeated cell queries.
///
/// Each node remembers the constraints that supported its last cell; a query
/// clips only against those and then checks every other constraint against
/// the resulting vertices, adding violators until none remain. Queries for
/// distinct nodes may run concurrently while heights are not being changed.
class CellEngine {
 public:
  explicit CellEngine(const NodalConvexFunction& f);

  std::size_t node_count() const { return node_count_; }
  double height(std::size_t i) const { return values_[i]; }
  void set_height(std::size_t i, double z) { values_[i] = z; }
  std::span<const double> heights() const { return {values_.data(), node_count_}; }
  std::span<const Vec2> positions() const { return positions_; }
  std::span<const double> values() const { return values_; }

  /// Cell of node i as if its height were z.
  TaggedPolygon cell(std::size_t i, double z);
  TaggedPolygon cell(std::size_t i) { return cell(i, values_[i]); }

  /// Cell of node i at height z using only `candidates` (no verification).
  TaggedPolygon cell_from(std::size_t i, double z, std::span<const int> candidates,
                          std::optional<ClipBox> hint = std::nullopt) const;

  /// Lower-hull support of every lifted point except node i, at x_i.
  HullSupport others_support(std::size_t i);

 private:
  std::size_t node_count_;
  std::vector<Vec2> positions_;
  std::vector<double> values_;
  std::vector<int> ring_;
  std::vector<std::vector<int>> active_;
  std::vector<std::array<int, 3>> basis_;
  std::vector<std::optional<ClipBox>> hint_;
};

}  // namespace detail

}  // namespace mongeampere
