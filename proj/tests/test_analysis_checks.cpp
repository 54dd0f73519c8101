#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mongeampere/analysis_checks.hpp"
#include "mongeampere/error.hpp"
#include "support.hpp"

using namespace mongeampere;
using testing_support::corner_samples;
using testing_support::square;

namespace {

NodalConvexFunction cone(double z) { return {square(), corner_samples(square()), {{0, 0}}, {z}}; }

Eigen::Matrix2d random_spd(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::Matrix2d b;
  b << u(rng), u(rng), u(rng), u(rng);
  return b * b.transpose() + 0.2 * Eigen::Matrix2d::Identity();
}

// Rotated diagonal matrix with eigenvalues drawn from [lo, hi].
Eigen::Matrix2d spd_in(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double th = 2.0 * std::numbers::pi * u(rng);
  Eigen::Matrix2d q;
  q << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  const Eigen::Vector2d d(lo + (hi - lo) * u(rng), lo + (hi - lo) * u(rng));
  return q * d.asDiagonal() * q.transpose();
}

double max_height_gap(const SolveReport& a, const SolveReport& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.solution.node_count(); ++i) {
    worst = std::max(worst, std::abs(a.solution.heights()[i] - b.solution.heights()[i]));
  }
  return worst;
}

}  // namespace

TEST(CheckComparison, ConeHeights) {
  const ComparisonReport r = check_comparison(cone(-1.0), cone(-1.0 / std::sqrt(2.0)));
  EXPECT_TRUE(r.hypothesis.overall);
  EXPECT_TRUE(r.conclusion_checked);
  EXPECT_TRUE(r.conclusion.overall);
  ASSERT_EQ(r.conclusion.records.size(), 1u);
  EXPECT_DOUBLE_EQ(r.conclusion.records[0].lhs, -1.0);
  EXPECT_NEAR(r.conclusion.records[0].rhs, -1.0 / std::sqrt(2.0), 1e-15);
}

TEST(CheckComparison, EqualFunctions) {
  const ComparisonReport r = check_comparison(cone(-0.3), cone(-0.3));
  EXPECT_TRUE(r.hypothesis.overall);
  EXPECT_TRUE(r.conclusion.overall);
}

TEST(CheckComparison, HypothesisFailureSkipsConclusion) {
  const ComparisonReport r = check_comparison(cone(-0.5), cone(-1.0));
  EXPECT_FALSE(r.hypothesis.overall);
  EXPECT_FALSE(r.conclusion_checked);
  EXPECT_TRUE(r.conclusion.records.empty());
}

TEST(CheckComparison, MismatchedInputs) {
  const NodalConvexFunction other(testing_support::regular_polygon(5), corner_samples(testing_support::regular_polygon(5)),
                                  {{0, 0}}, {-1.0});
  try {
    check_comparison(cone(-1.0), other);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::incompatible_inputs);
  }
}

TEST(CheckComparison, DominatedSolves) {
  std::mt19937_64 rng(89);
  for (int trial = 0; trial < 8; ++trial) {
    const DiracProblem p = testing_support::random_problem(rng, 15, trial % 2 == 1);
    DiracProblem q = p;
    std::uniform_real_distribution<double> shrink(0.3, 1.0);
    for (double& a : q.target_masses) a *= shrink(rng);
    const SolveReport u = solve_dirac(p);
    const SolveReport v = solve_dirac(q);
    const ComparisonReport r = check_comparison(u.solution, v.solution);
    EXPECT_TRUE(r.hypothesis.overall);
    EXPECT_TRUE(r.conclusion.overall) << trial;
  }
}

TEST(AlexandrovBound, Cone) {
  const BoundReport r = alexandrov_bound(cone(-1.0));
  ASSERT_EQ(r.records.size(), 1u);
  EXPECT_DOUBLE_EQ(r.records[0].lhs, 1.0);
  EXPECT_NEAR(r.records[0].rhs, 4.0 * std::sqrt(2.0), 1e-13);
  EXPECT_TRUE(r.overall);
}

TEST(AlexandrovBound, ZeroFunction) {
  const BoundReport r = alexandrov_bound(cone(0.0));
  EXPECT_EQ(r.records[0].lhs, 0.0);
  EXPECT_TRUE(r.overall);
}

TEST(AlexandrovBound, NonzeroDataRejected) {
  const NodalConvexFunction f(square(), corner_samples(square(), 1.0), {{0, 0}}, {0.0});
  try {
    alexandrov_bound(f);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::unsupported_input);
  }
}

TEST(AlexandrovBound, HoldsForSolverOutput) {
  std::mt19937_64 rng(97);
  for (int trial = 0; trial < 8; ++trial) {
    const SolveReport r = solve_dirac(testing_support::random_problem(rng, 20, true));
    EXPECT_TRUE(alexandrov_bound(r.solution).overall);
  }
}

TEST(AffineTransform, IdentityKeepsProblem) {
  std::mt19937_64 rng(101);
  const DiracProblem p = testing_support::random_problem(rng, 10, false);
  const DiracProblem q = affine_transform_problem(p, Eigen::Matrix2d::Identity(), {0, 0});
  ASSERT_EQ(q.nodes.size(), p.nodes.size());
  for (std::size_t i = 0; i < p.nodes.size(); ++i) EXPECT_EQ(q.nodes[i], p.nodes[i]);
  for (std::size_t k = 0; k < p.boundary.size(); ++k) EXPECT_EQ(q.boundary[k].value, p.boundary[k].value);
  EXPECT_EQ(q.target_masses, p.target_masses);
}

TEST(AffineTransform, UnimodularMapsPreserveHeights) {
  std::mt19937_64 rng(103);
  const double th = 0.7;
  Eigen::Matrix2d rot;
  rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  Eigen::Matrix2d stretch;
  stretch << 2.0, 0.0, 0.0, 0.5;
  for (const Eigen::Matrix2d& a : {rot, stretch}) {
    const DiracProblem p = testing_support::random_problem(rng, 12, false);
    const DiracProblem q = affine_transform_problem(p, a, {0.3, -0.1});
    EXPECT_LE(max_height_gap(solve_dirac(p), solve_dirac(q)), 1e-6);
  }
}

TEST(AffineTransform, GeneralScaling) {
  const DiracProblem p{square(), corner_samples(square()), {{0, 0}}, {2.0}};
  Eigen::Matrix2d a;
  a << 2.0, 0.0, 0.0, 2.0;
  const DiracProblem q = affine_transform_problem(p, a, {0, 0});
  EXPECT_DOUBLE_EQ(q.target_masses[0], 0.5);
  // u~(y) = u(2y) / 4 is the cone of depth 1/4 on [-1/2, 1/2]^2.
  EXPECT_NEAR(solve_dirac(q).solution.heights()[0], -0.25, 1e-8);
}

TEST(AffineTransform, InverseRoundTrip) {
  std::mt19937_64 rng(107);
  const DiracProblem p = testing_support::random_problem(rng, 10, false);
  Eigen::Matrix2d a;
  a << 1.3, 0.4, -0.2, 0.9;
  const Vec2 t{0.5, -0.25};
  const DiracProblem q = affine_transform_problem(p, a, t);
  const Eigen::Vector2d s = -(a.inverse() * Eigen::Vector2d(t.x, t.y));
  const DiracProblem back = affine_transform_problem(q, a.inverse(), {s.x(), s.y()});
  for (std::size_t i = 0; i < p.nodes.size(); ++i) EXPECT_LE(max_abs(back.nodes[i] - p.nodes[i]), 1e-12);
  for (std::size_t k = 0; k < p.boundary.size(); ++k) {
    EXPECT_LE(max_abs(back.boundary[k].point - p.boundary[k].point), 1e-12);
    EXPECT_NEAR(back.boundary[k].value, p.boundary[k].value, 1e-12);
  }
  for (std::size_t i = 0; i < p.target_masses.size(); ++i) EXPECT_NEAR(back.target_masses[i], p.target_masses[i], 1e-12);
}

TEST(AffineTransform, SingularMatrix) {
  Eigen::Matrix2d a;
  a << 1.0, 2.0, 2.0, 4.0;
  try {
    affine_transform_problem({square(), corner_samples(square()), {{0, 0}}, {1.0}}, a, {0, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::singular_transform);
  }
}

TEST(LogdetExpansion, Examples) {
  const SymMatrix id = SymMatrix::identity(2);
  EXPECT_NEAR(logdet_expansion_residual(id, id, 0.1), 2.0 * (std::log(1.1) - 0.1 + 0.005), 1e-15);
  EXPECT_NEAR(logdet_expansion_residual(id, id, 0.1), 6.2036e-4, 1e-8);
  EXPECT_EQ(logdet_expansion_residual(id, id, 0.0), 0.0);
  EXPECT_NEAR(logdet_expansion_residual(id, SymMatrix(2), 0.3), 0.0, 1e-16);
}

TEST(LogdetExpansion, NotPositiveDefinite) {
  SymMatrix m(2);
  m.set(0, 0, 1.0);
  m.set(1, 1, -1.0);
  try {
    logdet_expansion_residual(m, SymMatrix::identity(2), 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::not_positive_definite);
  }
}

TEST(LogdetExpansion, CubicScaling) {
  std::mt19937_64 rng(109);
  for (int trial = 0; trial < 20; ++trial) {
    // The eps^3 law is asymptotic in eps |M^-1 N|; keep that product below 0.1.
    const SymMatrix m(spd_in(rng, 1.0, 3.0));
    const SymMatrix n(spd_in(rng, 0.1, 1.0));
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (double eps : {0.1, 0.05, 0.025, 0.0125}) {
      const double x = std::log(eps), y = std::log(logdet_expansion_residual(m, n, eps));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double slope = (4 * sxy - sx * sy) / (4 * sxx - sx * sx);
    EXPECT_NEAR(slope, 3.0, 0.1) << trial;
  }
}

// Indefinite N: the eps^3 coefficient can nearly cancel, so compare with the
// exact value sum_k log(1 + eps l_k) - eps l_k + eps^2 l_k^2 / 2 over the
// eigenvalues l_k of M^{-1/2} N M^{-1/2}.
TEST(LogdetExpansion, IndefiniteDirectionMatchesEigenvalues) {
  std::mt19937_64 rng(139);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Matrix2d m = random_spd(rng);
    Eigen::Matrix2d nn;
    nn << u(rng), u(rng), 0.0, u(rng);
    nn(1, 0) = nn(0, 1);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(m);
    const Eigen::Matrix2d isq = es.operatorInverseSqrt();
    const Eigen::Vector2d l = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(isq * nn * isq).eigenvalues();
    for (double eps : {0.1, 0.05, 0.025, 0.0125}) {
      double want = 0.0;
      for (int k = 0; k < 2; ++k) want += std::log1p(eps * l(k)) - eps * l(k) + 0.5 * eps * eps * l(k) * l(k);
      EXPECT_NEAR(logdet_expansion_residual(SymMatrix(Eigen::MatrixXd(m)), SymMatrix(Eigen::MatrixXd(nn)), eps),
                  std::abs(want), 1e-12);
    }
  }
}

TEST(Logdet, Concave) {
  std::mt19937_64 rng(113);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Matrix2d a = random_spd(rng), b = random_spd(rng);
    EXPECT_GE(logdet(SymMatrix(Eigen::MatrixXd((a + b) / 2))),
              0.5 * (logdet(SymMatrix(Eigen::MatrixXd(a))) + logdet(SymMatrix(Eigen::MatrixXd(b)))) - 1e-12);
  }
}

TEST(GaussCurvature, Examples) {
  EXPECT_DOUBLE_EQ(gauss_curvature({0, 0}, SymMatrix::identity(2)), 1.0);
  SymMatrix flat(2);
  flat.set(0, 0, 1.0);
  EXPECT_EQ(gauss_curvature({0.3, 0.1}, flat), 0.0);
}

TEST(GaussCurvature, Hemisphere) {
  const Vec2 x{0.3, 0.4};
  const double s = std::sqrt(1.0 - dot(x, x));
  SymMatrix h(2);
  h.set(0, 0, (1.0 - x.y * x.y) / (s * s * s));
  h.set(0, 1, x.x * x.y / (s * s * s));
  h.set(1, 1, (1.0 - x.x * x.x) / (s * s * s));
  EXPECT_NEAR(gauss_curvature({x.x / s, x.y / s}, h), 1.0, 1e-8);
}

TEST(GaussCurvature, QuadraticAndPositiveDefinite) {
  std::mt19937_64 rng(127);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const SymMatrix q(Eigen::MatrixXd(random_spd(rng)));
    EXPECT_NEAR(gauss_curvature({0, 0}, q), q.to_eigen().determinant(), 1e-12);
    EXPECT_GT(gauss_curvature({u(rng), u(rng)}, q), 0.0);
  }
}

TEST(GaussCurvature, WrongDimension) {
  try {
    gauss_curvature({0, 0}, SymMatrix::identity(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::unsupported_dimension);
  }
}
