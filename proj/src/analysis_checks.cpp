#include "mongeampere/analysis_checks.hpp"

#include <cmath>

#include "mongeampere/error.hpp"

namespace mongeampere {

SymMatrix::SymMatrix(int n) : n_(n), data_(static_cast<std::size_t>(n * (n + 1) / 2), 0.0) {
  if (n < 1) throw Error(Errc::invalid_input, "matrix dimension must be positive");
}

SymMatrix::SymMatrix(const Eigen::MatrixXd& a) : SymMatrix(static_cast<int>(a.rows())) {
  if (a.rows() != a.cols()) throw Error(Errc::invalid_input, "matrix must be square");
  for (int i = 0; i < n_; ++i) {
    for (int j = i; j < n_; ++j) set(i, j, 0.5 * (a(i, j) + a(j, i)));
  }
}

SymMatrix SymMatrix::identity(int n) {
  SymMatrix m(n);
  for (int i = 0; i < n; ++i) m.set(i, i, 1.0);
  return m;
}

Eigen::MatrixXd SymMatrix::to_eigen() const {
  Eigen::MatrixXd a(n_, n_);
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) a(i, j) = (*this)(i, j);
  }
  return a;
}

ComparisonReport check_comparison(const NodalConvexFunction& u, const NodalConvexFunction& v, double mass_slack) {
  const auto du = u.domain().vertices();
  const auto dv = v.domain().vertices();
  const auto bu = u.boundary_samples();
  const auto bv = v.boundary_samples();
  const auto nu = u.nodes();
  const auto nv = v.nodes();
  bool same = du.size() == dv.size() && bu.size() == bv.size() && nu.size() == nv.size();
  for (std::size_t k = 0; same && k < du.size(); ++k) same = max_abs(du[k] - dv[k]) <= kGeomEps;
  for (std::size_t k = 0; same && k < bu.size(); ++k) {
    same = max_abs(bu[k].point - bv[k].point) <= kGeomEps && std::abs(bu[k].value - bv[k].value) <= kGeomEps;
  }
  for (std::size_t k = 0; same && k < nu.size(); ++k) same = max_abs(nu[k] - nv[k]) <= kGeomEps;
  if (!same) throw Error(Errc::incompatible_inputs, "comparison needs equal domain, boundary data and nodes");

  ComparisonReport r;
  const MAMeasure mu = ma_masses(u);
  const MAMeasure mv = ma_masses(v);
  for (std::size_t i = 0; i < nu.size(); ++i) {
    NodeBound b{i, mu.masses[i], mv.masses[i], mu.masses[i] >= mv.masses[i] - mass_slack};
    r.hypothesis.overall = r.hypothesis.overall && b.satisfied;
    r.hypothesis.records.push_back(b);
  }
  if (!r.hypothesis.overall) return r;

  r.conclusion_checked = true;
  for (std::size_t i = 0; i < nu.size(); ++i) {
    const double a = evaluate(u, nu[i]);
    const double b = evaluate(v, nu[i]);
    NodeBound nb{i, a, b, a <= b + 1e-10};
    r.conclusion.overall = r.conclusion.overall && nb.satisfied;
    r.conclusion.records.push_back(nb);
  }
  return r;
}

BoundReport alexandrov_bound(const NodalConvexFunction& f) {
  for (const BoundarySample& s : f.boundary_samples()) {
    if (s.value != 0.0) throw Error(Errc::unsupported_input, "Alexandrov bound needs zero boundary data");
  }
  const double total = ma_masses(f).total;
  const double diam = f.domain().diameter();
  BoundReport r;
  for (std::size_t i = 0; i < f.node_count(); ++i) {
    const Vec2 x = f.nodes()[i];
    const double u = evaluate(f, x);
    const double lhs = u * u;
    const double rhs = total * f.domain().boundary_distance(x) * diam;
    NodeBound b{i, lhs, rhs, lhs <= rhs * (1.0 + 1e-12) + 1e-14};
    r.overall = r.overall && b.satisfied;
    r.records.push_back(b);
  }
  return r;
}

DiracProblem affine_transform_problem(const DiracProblem& p, const Eigen::Matrix2d& a, Vec2 t) {
  const double det = a.determinant();
  const double sc = std::max(1.0, a.cwiseAbs().maxCoeff());
  if (!std::isfinite(det) || std::abs(det) <= 1e-14 * sc * sc) {
    throw Error(Errc::singular_transform, "transform matrix is singular");
  }
  const Eigen::Matrix2d inv = a.inverse();
  auto map = [&](Vec2 x) {
    const Eigen::Vector2d y = inv * Eigen::Vector2d(x.x - t.x, x.y - t.y);
    return Vec2{y.x(), y.y()};
  };
  const double w = 1.0 / std::abs(det);

  std::vector<Vec2> verts;
  for (Vec2 v : p.domain.vertices()) verts.push_back(map(v));
  std::vector<BoundarySample> boundary;
  for (const BoundarySample& s : p.boundary) boundary.push_back({map(s.point), w * s.value});
  std::vector<Vec2> nodes;
  for (Vec2 x : p.nodes) nodes.push_back(map(x));
  std::vector<double> masses;
  for (double m : p.target_masses) masses.push_back(w * m);
  return {ConvexPolygon(std::move(verts)), std::move(boundary), std::move(nodes), std::move(masses)};
}

double logdet(const SymMatrix& m) {
  const Eigen::LLT<Eigen::MatrixXd> llt(m.to_eigen());
  if (llt.info() != Eigen::Success) throw Error(Errc::not_positive_definite, "matrix is not positive definite");
  const Eigen::MatrixXd& l = llt.matrixLLT();
  double s = 0.0;
  for (int i = 0; i < m.dim(); ++i) {
    if (!(l(i, i) > 0.0)) throw Error(Errc::not_positive_definite, "matrix is not positive definite");
    s += 2.0 * std::log(l(i, i));
  }
  return s;
}

double logdet_expansion_residual(const SymMatrix& m, const SymMatrix& n, double eps) {
  if (m.dim() != n.dim()) throw Error(Errc::invalid_input, "matrix dimensions differ");
  const Eigen::MatrixXd me = m.to_eigen();
  const Eigen::MatrixXd ne = n.to_eigen();
  const double base = logdet(m);
  const double full = logdet(SymMatrix(Eigen::MatrixXd(me + eps * ne)));
  const Eigen::MatrixXd k = me.llt().solve(ne);
  const double first = k.trace();
  const double second = (k * k).trace();
  return std::abs(full - (base + eps * first - 0.5 * eps * eps * second));
}

double gauss_curvature(Vec2 grad, const SymMatrix& hess) {
  if (hess.dim() != 2) throw Error(Errc::unsupported_dimension, "curvature formula is implemented for n = 2");
  const double det = hess(0, 0) * hess(1, 1) - hess(0, 1) * hess(0, 1);
  const double q = 1.0 + dot(grad, grad);
  return det / (q * q);
}

}  // namespace mongeampere
