#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mongeampere/dirichlet_solver.hpp"
#include "mongeampere/ma_measure.hpp"

namespace mongeampere {

struct NodeBound {
  std::size_t node = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool satisfied = true;
};

struct BoundReport {
  std::vector<NodeBound> records;
  bool overall = true;
};

/// Symmetric n x n matrix stored as its upper triangle.
class SymMatrix {
 public:
  explicit SymMatrix(int n = 2);
  /// Symmetric part (A + A^T) / 2 of a square matrix.
  explicit SymMatrix(const Eigen::MatrixXd& a);
  static SymMatrix identity(int n);

  int dim() const { return n_; }
  double operator()(int i, int j) const { return data_[index(i, j)]; }
  void set(int i, int j, double v) { data_[index(i, j)] = v; }
  Eigen::MatrixXd to_eigen() const;

 private:
  int index(int i, int j) const {
    if (i > j) std::swap(i, j);
    return i * n_ - i * (i - 1) / 2 + (j - i);
  }
  int n_;
  std::vector<double> data_;
};

struct ComparisonReport {
  /// lhs = Mu(x_i), rhs = Mv(x_i); satisfied when lhs >= rhs - mass_slack.
  BoundReport hypothesis;
  /// lhs = u(x_i), rhs = v(x_i); satisfied when lhs <= rhs + 1e-10. Empty if
  /// the hypothesis fails.
  BoundReport conclusion;
  bool conclusion_checked = false;
};

/// Checks Mu >= Mv node-wise and then u <= v at every node. u and v must share
/// domain, boundary samples and nodes (Errc::incompatible_inputs otherwise).
ComparisonReport check_comparison(const NodalConvexFunction& u, const NodalConvexFunction& v,
                                  double mass_slack = 1e-8);

/// |u(x_i)|^2 <= Mu(domain) * dist(x_i, boundary) * diam(domain) at every node.
///
/// The constant is 1 in the plane: if u(x_i) = -h the subgradients at x_i of
/// the cone with vertex (x_i, -h) over the domain all belong to Mu(domain), and
/// they contain the triangle with apex h/dist in the direction of the nearest
/// boundary point and base a diameter of the disk of radius h/diam, whose area
/// is h^2 / (dist * diam).
///
/// Throws Error{Errc::unsupported_input} unless the boundary data is zero.
BoundReport alexandrov_bound(const NodalConvexFunction& f);

/// Problem for u~(y) = |det A|^{-1} u(Ay + t): points move by y = A^{-1}(x - t),
/// boundary values and masses scale by 1/|det A|. Throws
/// Error{Errc::singular_transform} when det A = 0.
DiracProblem affine_transform_problem(const DiracProblem& problem, const Eigen::Matrix2d& a, Vec2 t);

/// Throws Error{Errc::not_positive_definite}.
double logdet(const SymMatrix& m);

/// |log det(M + eps N) - (log det M + eps tr(M^-1 N) - eps^2/2 tr(M^-1 N M^-1 N))|
double logdet_expansion_residual(const SymMatrix& m, const SymMatrix& n, double eps);

/// K = det(hess) / (1 + |grad|^2)^2. Throws Error{Errc::unsupported_dimension}
/// unless hess is 2 x 2.
double gauss_curvature(Vec2 grad, const SymMatrix& hess);

}  // namespace mongeampere
