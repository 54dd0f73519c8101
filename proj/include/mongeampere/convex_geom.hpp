#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace mongeampere {

/// Single tolerance used for vertex merging, turn tests and membership tests.
/// Comparisons scale it by the magnitude of the coordinates involved.
inline constexpr double kGeomEps = 1e-12;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  constexpr bool operator==(const Vec2&) const = default;
};

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }
constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double max_abs(Vec2 a) { return std::max(std::abs(a.x), std::abs(a.y)); }

/// The closed half-plane { p : normal . p <= offset }.
struct HalfPlane {
  Vec2 normal;
  double offset = 0.0;
};

/// Convex polygon with counter-clockwise vertices.
///
/// The constructor validates: at least three vertices, finite coordinates, no
/// repeated consecutive vertices, no reflex turns beyond kGeomEps, a single
/// winding, and nonzero area. Clockwise input is reversed. Violations throw
/// Error{Errc::invalid_polygon}.
class ConvexPolygon {
 public:
  explicit ConvexPolygon(std::vector<Vec2> vertices);

  std::span<const Vec2> vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  Vec2 vertex(std::size_t k) const { return vertices_[k % vertices_.size()]; }

  double area() const;
  double diameter() const;
  Vec2 centroid() const;
  /// Largest coordinate magnitude; the length scale used for tolerances.
  double scale() const;

  /// Closed membership test with a scale-relative tolerance.
  bool contains(Vec2 p, double tol = kGeomEps) const;
  /// True when p is inside and farther than tol from every edge.
  bool strictly_contains(Vec2 p, double tol = kGeomEps) const;
  /// Distance from p to the nearest edge (as segments).
  double boundary_distance(Vec2 p) const;
  /// Index of an edge containing p (within tol), or -1.
  int edge_containing(Vec2 p, double tol = kGeomEps) const;

  /// One half-plane per edge; their intersection is the polygon.
  std::vector<HalfPlane> halfplanes() const;

 private:
  std::vector<Vec2> vertices_;
};

/// Result of a half-plane intersection. Degenerate holds a point or a segment
/// (one or two points): a feasible set of zero area.
class Region {
 public:
  enum class Kind { empty, degenerate, bounded, unbounded };

  static Region empty() { return Region(EmptyTag{}); }
  static Region unbounded() { return Region(UnboundedTag{}); }
  static Region degenerate(std::vector<Vec2> points) { return Region(Degenerate{std::move(points)}); }
  static Region bounded(ConvexPolygon polygon) { return Region(std::move(polygon)); }

  Kind kind() const;
  bool is_empty() const { return kind() == Kind::empty; }
  bool is_bounded() const { return kind() == Kind::bounded; }
  bool is_unbounded() const { return kind() == Kind::unbounded; }

  /// Zero for empty and degenerate regions, +inf for unbounded ones.
  double area() const;
  /// Throws Error{Errc::invalid_polygon} unless kind() == bounded.
  const ConvexPolygon& polygon() const;
  /// Polygon vertices, the degenerate point set, or nothing.
  std::vector<Vec2> points() const;

 private:
  struct EmptyTag {};
  struct UnboundedTag {};
  struct Degenerate {
    std::vector<Vec2> points;
  };
  using Storage = std::variant<EmptyTag, Degenerate, ConvexPolygon, UnboundedTag>;

  explicit Region(Storage s) : storage_(std::move(s)) {}
  Storage storage_;
};

/// Exact (up to rounding) intersection of half-planes. Redundant constraints do
/// not appear in the result; the vertex list starts at the lexicographically
/// smallest vertex so equal sets compare equal regardless of input order.
/// Throws Error{Errc::invalid_constraint} for a zero or non-finite normal.
Region halfplane_intersection(std::span<const HalfPlane> constraints);

/// Intersection of two convex polygons.
Region intersect(const ConvexPolygon& a, const ConvexPolygon& b);

struct PolygonMetrics {
  double area = 0.0;
  double diameter = 0.0;
  double boundary_distance = 0.0;
};

/// Throws Error{Errc::outside_domain} when x is strictly outside poly.
PolygonMetrics polygon_metrics(const ConvexPolygon& poly, Vec2 x);

namespace detail {

/// Half-plane intersection that also reports, for each output edge, the tag of
/// the constraint supporting it (edge k joins vertices k and k+1). Tags come
/// from `tags` (parallel to `planes`); -1 marks the artificial bounding box.
struct TaggedPolygon {
  Region::Kind kind = Region::Kind::empty;
  std::vector<Vec2> vertices;
  std::vector<int> edge_tags;

  double area() const;
};

/// Axis-aligned square guess for where the answer lies.
struct ClipBox {
  Vec2 center;
  double half_width = 0.0;
};

/// With a hint, a single clip against the hint box is tried first and kept
/// only if no box edge survives; otherwise the unhinted path runs.
TaggedPolygon clip_halfplanes(std::span<const HalfPlane> planes, std::span<const int> tags,
                              std::optional<ClipBox> hint = std::nullopt);

/// Recession-cone test: true when some direction d != 0 has normal . d <= 0
/// for every normal, i.e. a feasible intersection would be unbounded.
bool has_recession_direction(std::span<const HalfPlane> planes);

}  // namespace detail

}  // namespace mongeampere
