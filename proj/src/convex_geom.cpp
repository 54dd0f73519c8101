#include "mongeampere/convex_geom.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <string>

#include "mongeampere/error.hpp"

namespace mongeampere {

namespace {

constexpr double kFirstPassHalfWidth = 5e8;  // bounding box of side 1e9

double degenerate_area(double scale) { return 1e-15 * (1.0 + scale) * (1.0 + scale); }

double signed_area(std::span<const Vec2> v) {
  double a = 0.0;
  const std::size_t n = v.size();
  for (std::size_t k = 0; k < n; ++k) a += cross(v[k], v[(k + 1) % n]);
  return 0.5 * a;
}

double coordinate_scale(std::span<const Vec2> v) {
  double s = 0.0;
  for (Vec2 p : v) s = std::max(s, max_abs(p));
  return s;
}

double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (a + ab * t));
}

struct ClipVertex {
  Vec2 p;
  int edge;  // plane index of the edge leaving this vertex; -1 for the box
};

using ClipPolygon = std::vector<ClipVertex>;

ClipPolygon make_box(Vec2 c, double r) {
  return {{{c.x - r, c.y - r}, -1},
          {{c.x + r, c.y - r}, -1},
          {{c.x + r, c.y + r}, -1},
          {{c.x - r, c.y + r}, -1}};
}

void push_merged(ClipPolygon& out, ClipVertex v) {
  if (!out.empty()) {
    const Vec2 d = out.back().p - v.p;
    if (max_abs(d) <= 1e-15 * (1.0 + max_abs(v.p))) {
      out.back() = v;
      return;
    }
  }
  out.push_back(v);
}

// One Sutherland-Hodgman step against a single half-plane. Vertices within the
// tolerance band of the line count as on it and are kept without splitting.
void clip_one(const ClipPolygon& in, const HalfPlane& h, int index, ClipPolygon& out) {
  out.clear();
  const std::size_t n = in.size();
  if (n == 0) return;
  const double nn = norm(h.normal);

  thread_local std::vector<double> s;
  thread_local std::vector<int> sign;
  s.resize(n);
  sign.resize(n);
  bool any_out = false;
  bool any_in = false;
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2 p = in[k].p;
    s[k] = dot(h.normal, p) - h.offset;
    const double tol = kGeomEps * (nn * (1.0 + max_abs(p)) + std::abs(h.offset));
    sign[k] = s[k] > tol ? 1 : (s[k] < -tol ? -1 : 0);
    any_out |= sign[k] > 0;
    any_in |= sign[k] <= 0;
  }
  if (!any_out) {
    out = in;
    return;
  }
  if (!any_in) return;

  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = (k + 1) % n;
    const ClipVertex& cur = in[k];
    const ClipVertex& nxt = in[j];
    if (sign[k] <= 0) {
      if (sign[j] > 0) {
        if (sign[k] < 0) {
          push_merged(out, cur);
          const double t = s[k] / (s[k] - s[j]);
          push_merged(out, {cur.p + (nxt.p - cur.p) * t, index});
        } else {
          push_merged(out, {cur.p, index});
        }
      } else {
        push_merged(out, cur);
      }
    } else if (sign[j] < 0) {
      const double t = s[k] / (s[k] - s[j]);
      push_merged(out, {cur.p + (nxt.p - cur.p) * t, cur.edge});
    }
  }
  while (out.size() > 1) {
    const Vec2 d = out.back().p - out.front().p;
    if (max_abs(d) > 1e-15 * (1.0 + max_abs(out.front().p))) break;
    // front duplicates back: the back vertex's outgoing edge is zero length.
    out.pop_back();
  }
}

ClipPolygon clip_all(std::span<const HalfPlane> planes, Vec2 center, double half_width) {
  ClipPolygon poly = make_box(center, half_width);
  ClipPolygon next;
  poly.reserve(16);
  next.reserve(16);
  for (std::size_t i = 0; i < planes.size() && !poly.empty(); ++i) {
    clip_one(poly, planes[i], static_cast<int>(i), next);
    std::swap(poly, next);
  }
  return poly;
}

void validate(std::span<const HalfPlane> planes) {
  for (const HalfPlane& h : planes) {
    if (!std::isfinite(h.normal.x) || !std::isfinite(h.normal.y) || !std::isfinite(h.offset)) {
      throw Error(Errc::invalid_constraint, "non-finite half-plane");
    }
    if (h.normal.x == 0.0 && h.normal.y == 0.0) {
      throw Error(Errc::invalid_constraint, "half-plane with zero normal");
    }
  }
}

// Snap each vertex to the intersection of its two supporting lines. Clipping
// accumulates error along long box edges; the defining lines do not.
void snap_vertices(ClipPolygon& poly, std::span<const HalfPlane> planes) {
  const std::size_t n = poly.size();
  if (n < 2) return;
  const double scale = 1.0 + [&] {
    double m = 0.0;
    for (const auto& v : poly) m = std::max(m, max_abs(v.p));
    return m;
  }();
  std::vector<Vec2> snapped(n);
  for (std::size_t k = 0; k < n; ++k) {
    snapped[k] = poly[k].p;
    const int a = poly[(k + n - 1) % n].edge;
    const int b = poly[k].edge;
    if (a < 0 || b < 0 || a == b) continue;
    const HalfPlane& ha = planes[a];
    const HalfPlane& hb = planes[b];
    const double det = cross(ha.normal, hb.normal);
    if (std::abs(det) <= 1e-10 * norm(ha.normal) * norm(hb.normal)) continue;
    const Vec2 p{(ha.offset * hb.normal.y - hb.offset * ha.normal.y) / det,
                 (ha.normal.x * hb.offset - hb.normal.x * ha.offset) / det};
    if (max_abs(p - poly[k].p) <= 1e-6 * scale) snapped[k] = p;
  }
  for (std::size_t k = 0; k < n; ++k) poly[k].p = snapped[k];
}

// Merge near-coincident vertices, then drop vertices that do not turn left.
void clean(ClipPolygon& poly) {
  double scale = 0.0;
  for (const auto& v : poly) scale = std::max(scale, max_abs(v.p));
  const double merge_tol = kGeomEps * (1.0 + scale);

  bool changed = true;
  while (changed && poly.size() > 1) {
    changed = false;
    for (std::size_t k = 0; k < poly.size() && poly.size() > 1; ++k) {
      const std::size_t j = (k + 1) % poly.size();
      if (max_abs(poly[k].p - poly[j].p) <= merge_tol) {
        // Keep the later vertex: its outgoing edge survives.
        poly.erase(poly.begin() + static_cast<std::ptrdiff_t>(k));
        changed = true;
        break;
      }
    }
  }
  changed = true;
  while (changed && poly.size() >= 3) {
    changed = false;
    const std::size_t n = poly.size();
    for (std::size_t k = 0; k < n; ++k) {
      const Vec2 a = poly[(k + n - 1) % n].p;
      const Vec2 b = poly[k].p;
      const Vec2 c = poly[(k + 1) % n].p;
      const Vec2 e1 = b - a;
      const Vec2 e2 = c - b;
      if (cross(e1, e2) <= kGeomEps * norm(e1) * norm(e2)) {
        // b lies on (or behind) the chord ac; the incoming edge continues.
        poly.erase(poly.begin() + static_cast<std::ptrdiff_t>(k));
        changed = true;
        break;
      }
    }
  }
}

void rotate_to_smallest(std::vector<Vec2>& v, std::vector<int>* tags) {
  if (v.empty()) return;
  const auto it = std::min_element(v.begin(), v.end(), [](Vec2 a, Vec2 b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  const auto shift = it - v.begin();
  std::rotate(v.begin(), it, v.end());
  if (tags) std::rotate(tags->begin(), tags->begin() + shift, tags->end());
}

std::vector<Vec2> extreme_pair(std::span<const Vec2> pts) {
  if (pts.size() <= 1) return {pts.begin(), pts.end()};
  std::size_t bi = 0;
  std::size_t bj = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double d = norm(pts[i] - pts[j]);
      if (d > best) {
        best = d;
        bi = i;
        bj = j;
      }
    }
  }
  const double scale = coordinate_scale(pts);
  if (best <= kGeomEps * (1.0 + scale)) return {pts[bi]};
  std::vector<Vec2> out{pts[bi], pts[bj]};
  rotate_to_smallest(out, nullptr);
  return out;
}

}  // namespace

// ---------------------------------------------------------------- ConvexPolygon

ConvexPolygon::ConvexPolygon(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
  const std::size_t n = vertices_.size();
  if (n < 3) throw Error(Errc::invalid_polygon, "fewer than 3 vertices");
  for (Vec2 p : vertices_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw Error(Errc::invalid_polygon, "non-finite vertex");
  }
  const double sc = coordinate_scale(vertices_);
  const double a = signed_area(vertices_);
  if (std::abs(a) <= degenerate_area(sc)) throw Error(Errc::invalid_polygon, "degenerate (collinear) polygon");
  if (a < 0.0) std::reverse(vertices_.begin(), vertices_.end());

  double turning = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2 e1 = vertices_[k] - vertices_[(k + n - 1) % n];
    const Vec2 e2 = vertices_[(k + 1) % n] - vertices_[k];
    if (max_abs(e2) <= kGeomEps * (1.0 + sc)) throw Error(Errc::invalid_polygon, "repeated vertex");
    if (cross(e1, e2) < -kGeomEps * norm(e1) * norm(e2)) throw Error(Errc::invalid_polygon, "reflex vertex");
    turning += std::atan2(cross(e1, e2), dot(e1, e2));
  }
  if (std::abs(turning - 2.0 * std::numbers::pi) > 1e-6) {
    throw Error(Errc::invalid_polygon, "polygon winds more than once");
  }
}

double ConvexPolygon::area() const { return signed_area(vertices_); }

double ConvexPolygon::diameter() const {
  double d = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    for (std::size_t j = i + 1; j < vertices_.size(); ++j) d = std::max(d, norm(vertices_[i] - vertices_[j]));
  }
  return d;
}

Vec2 ConvexPolygon::centroid() const {
  Vec2 c;
  double a6 = 0.0;
  const std::size_t n = vertices_.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2 p = vertices_[k];
    const Vec2 q = vertices_[(k + 1) % n];
    const double w = cross(p, q);
    c += (p + q) * w;
    a6 += 3.0 * w;
  }
  return c / a6;
}

double ConvexPolygon::scale() const { return coordinate_scale(vertices_); }

bool ConvexPolygon::contains(Vec2 p, double tol) const {
  const double band = tol * (1.0 + scale());
  const std::size_t n = vertices_.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2 a = vertices_[k];
    const Vec2 e = vertices_[(k + 1) % n] - a;
    if (cross(e, p - a) < -band * norm(e)) return false;
  }
  return true;
}

bool ConvexPolygon::strictly_contains(Vec2 p, double tol) const {
  const double band = tol * (1.0 + scale());
  const std::size_t n = vertices_.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2 a = vertices_[k];
    const Vec2 e = vertices_[(k + 1) % n] - a;
    if (cross(e, p - a) <= band * norm(e)) return false;
  }
  return true;
}

double ConvexPolygon::boundary_distance(Vec2 p) const {
  double d = std::numeric_limits<double>::infinity();
  const std::size_t n = vertices_.size();
  for (std::size_t k = 0; k < n; ++k) d = std::min(d, segment_distance(p, vertices_[k], vertices_[(k + 1) % n]));
  return d;
}

int ConvexPolygon::edge_containing(Vec2 p, double tol) const {
  const double band = tol * (1.0 + scale());
  const std::size_t n = vertices_.size();
  for (std::size_t k = 0; k < n; ++k) {
    if (segment_distance(p, vertices_[k], vertices_[(k + 1) % n]) <= band) return static_cast<int>(k);
  }
  return -1;
}

std::vector<HalfPlane> ConvexPolygon::halfplanes() const {
  std::vector<HalfPlane> out;
  const std::size_t n = vertices_.size();
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2 a = vertices_[k];
    const Vec2 e = vertices_[(k + 1) % n] - a;
    const Vec2 outward{e.y, -e.x};
    out.push_back({outward, dot(outward, a)});
  }
  return out;
}

// ----------------------------------------------------------------------- Region

Region::Kind Region::kind() const {
  switch (storage_.index()) {
    case 0: return Kind::empty;
    case 1: return Kind::degenerate;
    case 2: return Kind::bounded;
    default: return Kind::unbounded;
  }
}

double Region::area() const {
  if (const auto* poly = std::get_if<ConvexPolygon>(&storage_)) return poly->area();
  if (std::holds_alternative<UnboundedTag>(storage_)) return std::numeric_limits<double>::infinity();
  return 0.0;
}

const ConvexPolygon& Region::polygon() const {
  if (const auto* poly = std::get_if<ConvexPolygon>(&storage_)) return *poly;
  throw Error(Errc::invalid_polygon, "region is not a bounded polygon");
}

std::vector<Vec2> Region::points() const {
  if (const auto* poly = std::get_if<ConvexPolygon>(&storage_)) {
    return {poly->vertices().begin(), poly->vertices().end()};
  }
  if (const auto* deg = std::get_if<Degenerate>(&storage_)) return deg->points;
  return {};
}

// --------------------------------------------------------- half-plane clipping

namespace detail {

double TaggedPolygon::area() const {
  return kind == Region::Kind::bounded ? signed_area(vertices) : 0.0;
}

bool has_recession_direction(std::span<const HalfPlane> planes) {
  if (planes.empty()) return true;
  std::vector<double> angles;
  angles.reserve(planes.size());
  for (const HalfPlane& h : planes) angles.push_back(std::atan2(h.normal.y, h.normal.x));
  std::sort(angles.begin(), angles.end());
  double gap = angles.front() + 2.0 * std::numbers::pi - angles.back();
  for (std::size_t k = 1; k < angles.size(); ++k) gap = std::max(gap, angles[k] - angles[k - 1]);
  return gap >= std::numbers::pi - 1e-12;
}

namespace {

TaggedPolygon finish(ClipPolygon& fine, std::span<const HalfPlane> planes, std::span<const int> tags) {
  TaggedPolygon result;
  snap_vertices(fine, planes);
  clean(fine);
  if (fine.empty()) return result;

  std::vector<Vec2> verts;
  verts.reserve(fine.size());
  for (const auto& v : fine) verts.push_back(v.p);
  const double sc = coordinate_scale(verts);
  if (verts.size() >= 3 && signed_area(verts) > degenerate_area(sc)) {
    result.kind = Region::Kind::bounded;
    result.edge_tags.reserve(fine.size());
    for (const auto& v : fine) {
      result.edge_tags.push_back(v.edge >= 0 && static_cast<std::size_t>(v.edge) < tags.size() ? tags[v.edge] : -1);
    }
    result.vertices = std::move(verts);
    rotate_to_smallest(result.vertices, &result.edge_tags);
  } else {
    result.kind = Region::Kind::degenerate;
    result.vertices = extreme_pair(verts);
  }
  return result;
}

}  // namespace

TaggedPolygon clip_halfplanes(std::span<const HalfPlane> planes, std::span<const int> tags,
                              std::optional<ClipBox> hint) {
  validate(planes);
  TaggedPolygon result;
  if (hint && !planes.empty()) {
    ClipPolygon guess = clip_all(planes, hint->center, hint->half_width);
    const bool inside = !guess.empty() && std::none_of(guess.begin(), guess.end(),
                                                       [](const ClipVertex& v) { return v.edge < 0; });
    if (inside) return finish(guess, planes, tags);
  }
  if (planes.empty()) {
    result.kind = Region::Kind::unbounded;
    return result;
  }

  ClipPolygon coarse = clip_all(planes, {0.0, 0.0}, kFirstPassHalfWidth);
  if (coarse.empty()) return result;
  if (has_recession_direction(planes)) {
    result.kind = Region::Kind::unbounded;
    return result;
  }

  // Second pass in a box fitted to the coarse result, so that rounding is
  // relative to the size of the answer rather than to the first box.
  Vec2 lo = coarse.front().p;
  Vec2 hi = lo;
  for (const auto& v : coarse) {
    lo = {std::min(lo.x, v.p.x), std::min(lo.y, v.p.y)};
    hi = {std::max(hi.x, v.p.x), std::max(hi.y, v.p.y)};
  }
  const Vec2 center = (lo + hi) * 0.5;
  const double half = 0.5 * std::max(hi.x - lo.x, hi.y - lo.y);
  ClipPolygon fine = clip_all(planes, center, 2.0 * half + 1.0);
  if (fine.empty()) return result;
  return finish(fine, planes, tags);
}

}  // namespace detail

Region halfplane_intersection(std::span<const HalfPlane> constraints) {
  std::vector<int> tags(constraints.size());
  for (std::size_t i = 0; i < tags.size(); ++i) tags[i] = static_cast<int>(i);
  detail::TaggedPolygon t = detail::clip_halfplanes(constraints, tags);
  switch (t.kind) {
    case Region::Kind::empty: return Region::empty();
    case Region::Kind::unbounded: return Region::unbounded();
    case Region::Kind::degenerate: return Region::degenerate(std::move(t.vertices));
    case Region::Kind::bounded: return Region::bounded(ConvexPolygon(std::move(t.vertices)));
  }
  return Region::empty();
}

Region intersect(const ConvexPolygon& a, const ConvexPolygon& b) {
  std::vector<HalfPlane> planes = a.halfplanes();
  const std::vector<HalfPlane> more = b.halfplanes();
  planes.insert(planes.end(), more.begin(), more.end());
  return halfplane_intersection(planes);
}

PolygonMetrics polygon_metrics(const ConvexPolygon& poly, Vec2 x) {
  if (!poly.contains(x)) throw Error(Errc::outside_domain, "point is outside the polygon");
  return {poly.area(), poly.diameter(), poly.boundary_distance(x)};
}

}  // namespace mongeampere
