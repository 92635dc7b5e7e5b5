#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace ballsaddle;
using fixtures::diag;
using fixtures::vec;

TEST(MakeConstant, ValueJacobianAndConstants) {
  const auto m = make_constant(vec({1, 0}), 1.0);
  EXPECT_EQ(m.value(vec({0.3, -0.2})), vec({1, 0}));
  EXPECT_TRUE(m.jacobian(vec({0.3, -0.2})).isZero());
  ASSERT_TRUE(m.analytic);
  EXPECT_EQ(m.analytic->theta.value, 0.0);
  EXPECT_EQ(m.analytic->gamma.value, 0.0);
  EXPECT_EQ(m.analytic->eta->value, 1.0);
  EXPECT_EQ(m.analytic->theta.how, Certification::analytic);
}

TEST(MakeConstant, RejectsBadRadius) {
  EXPECT_THROW(make_constant(vec({1, 0}), 0.0), InvalidArgument);
  EXPECT_THROW(make_constant(vec({1, 0}), -2.0), InvalidArgument);
}

TEST(MakeAffine, ShiftedIdentityConstants) {
  const auto m = make_affine(Matrix::Identity(2, 2), vec({2, 0}), 1.0);
  EXPECT_NEAR(m.analytic->theta.value, 1.0, 1e-9);
  EXPECT_EQ(m.analytic->gamma.value, 0.0);
  EXPECT_NEAR(m.analytic->eta->value, 0.0, 1e-12);
}

TEST(MakeAffine, DiagonalConstants) {
  const auto m = make_affine(diag({2, 1}), Point::Zero(2), 1.0);
  EXPECT_NEAR(m.analytic->theta.value, 2.0, 1e-9);
  EXPECT_NEAR(m.analytic->eta->value, 1.0, 1e-9);
}

TEST(MakeAffine, ZeroMatrixIsConstant) {
  const auto a = make_affine(Matrix::Zero(2, 2), vec({1, 3}), 1.0);
  const auto c = make_constant(vec({1, 3}), 1.0);
  EXPECT_EQ(a.value(vec({0.1, 0.2})), c.value(vec({0.1, 0.2})));
  EXPECT_EQ(a.analytic->theta.value, c.analytic->theta.value);
  EXPECT_NEAR(a.analytic->eta->value, c.analytic->eta->value, 1e-12);
}

TEST(MakeAffine, RejectsShapeMismatch) {
  EXPECT_THROW(make_affine(Matrix::Identity(2, 3), vec({1, 0}), 1.0), DimensionError);
  EXPECT_THROW(make_affine(Matrix::Identity(2, 2), vec({1, 0, 0}), 1.0), DimensionError);
}

TEST(MakeQuadratic, ZeroCurvatureIsAffine) {
  const Matrix A = diag({2, 1});
  const auto q = make_quadratic(A, vec({1, 0}), {Matrix::Zero(2, 2), Matrix::Zero(2, 2)}, 1.0);
  const auto a = make_affine(A, vec({1, 0}), 1.0);
  EXPECT_EQ(q.value(vec({0.2, 0.3})), a.value(vec({0.2, 0.3})));
  EXPECT_NEAR(q.analytic->theta.value, a.analytic->theta.value, 1e-12);
  EXPECT_EQ(q.analytic->gamma.value, 0.0);
}

TEST(MakeQuadratic, OneDimensionalSquare) {
  const double rho = 0.7;
  const auto q = make_quadratic(Matrix::Zero(1, 1), Point::Zero(1), {Matrix::Identity(1, 1)}, rho);
  EXPECT_NEAR(q.value(vec({0.5}))(0), 0.25, 1e-15);
  EXPECT_NEAR(q.jacobian(vec({0.5}))(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(q.analytic->gamma.value, 2.0, 1e-12);
  EXPECT_NEAR(q.analytic->theta.value, 2.0 * rho, 1e-12);
  EXPECT_EQ(q.analytic->theta.how, Certification::conservative);
  // the sampled estimate of gamma reaches the exact value 2
  const Constant g = estimate_lipschitz(q.jacobian, 1, rho, 1000, 0);
  EXPECT_GE(g.value, 2.0 - 1e-3);
  EXPECT_LE(g.value, 2.0 + 1e-8);
}

TEST(MakeQuadratic, NormSquaredHasFlatOrigin) {
  const auto psi = fixtures::norm_squared_map(2, 1.0);
  EXPECT_TRUE(psi.jacobian(Point::Zero(2)).isZero());
  EXPECT_NEAR(psi.value(vec({0.6, 0.8}))(0), 1.0, 1e-15);
  EXPECT_NEAR(psi.analytic->theta.value, 2.0, 1e-12);
  EXPECT_NEAR(psi.analytic->gamma.value, 2.0, 1e-12);
}

TEST(MakeQuadratic, RejectsNonSymmetricCurvature) {
  Matrix Q(2, 2);
  Q << 0, 1, 0, 0;
  EXPECT_THROW(make_quadratic(Matrix::Zero(2, 2), Point::Zero(2), {Q, Matrix::Zero(2, 2)}, 1.0),
               InvalidArgument);
}

TEST(Restricted, RecomputesRadiusDependentConstants) {
  const auto q = make_quadratic(Matrix::Zero(1, 1), Point::Zero(1), {Matrix::Identity(1, 1)}, 1.0);
  const auto r = restricted(q, 0.25);
  EXPECT_EQ(r.rho, 0.25);
  EXPECT_NEAR(r.analytic->theta.value, 0.5, 1e-12);
  EXPECT_THROW(restricted(q, 2.0), InvalidArgument);
}

TEST(Shifted, SubtractsTarget) {
  const auto psi = fixtures::norm_squared_map(2, 1.0);
  const auto phi = shifted(psi, vec({16, 0}));
  EXPECT_EQ(phi.value(vec({1, 0})), vec({-15, 0}));
  EXPECT_EQ(phi.jacobian(vec({1, 0})), psi.jacobian(vec({1, 0})));
}

TEST(Validate, AcceptsCatalogAndRejectsWrongJacobian) {
  for (const auto& [name, m] : fixtures::catalog_maps()) {
    SCOPED_TRACE(name);
    EXPECT_NO_THROW(validate(m, 100, 1));
    EXPECT_LE(jacobian_fd_error(m, 100, 2), 1e-5);
  }
  auto bad = make_affine(diag({2, 1}), Point::Zero(2), 1.0);
  bad.jacobian = [](const Point&) -> Matrix { return Matrix::Identity(2, 2); };
  EXPECT_THROW(validate(bad, 20, 0), InvalidArgument);
}

TEST(CatalogConstants, SampledEstimatesStayBelowDeclared) {
  for (const auto& [name, m] : fixtures::catalog_maps()) {
    SCOPED_TRACE(name);
    const auto n = m.dimension;
    const Constant gamma = estimate_lipschitz(m.jacobian, n, m.rho, 500, 3);
    EXPECT_LE(gamma.value, m.analytic->gamma.value + 1e-8);
    std::function<Point(const Point&)> res = [v = m.value](const Point& x) -> Point { return x - v(x); };
    EXPECT_LE(estimate_lipschitz(res, n, m.rho, 500, 4).value, m.analytic->eta->value + 1e-8);
    EstimationOptions sampled;
    sampled.use_analytic = false;
    sampled.samples = 500;
    EXPECT_LE(estimate_theta(m, sampled).value, m.analytic->theta.value + 1e-8);
  }
}

TEST(ViPayoff, ConstantMap) {
  const auto J = vi_payoff(make_constant(vec({1, 0}), 1.0));
  EXPECT_DOUBLE_EQ(J.value(vec({0.5, 0}), vec({0, 1})), 0.5);
  EXPECT_EQ(J.grad_x(vec({0.2, 0.3}), vec({-0.4, 0.1})), vec({1, 0}));
  EXPECT_TRUE(J.y_set.is_ball());
  EXPECT_EQ(J.grad_lipschitz->value, 0.0);
}

TEST(ViPayoff, IdentitySubstitution) {
  const auto J = vi_payoff(make_affine(Matrix::Identity(2, 2), Point::Zero(2), 2.0));
  EXPECT_DOUBLE_EQ(J.value(vec({1, 0}), vec({0, 1})), 1.0);
  EXPECT_NEAR(J.grad_lipschitz->value, 2.0, 1e-9);
}

TEST(ViPayoff, AnalyticYGradientIsMinusPhi) {
  const auto phi = fixtures::random_quadratic(7, 3, 1.0);
  const auto J = vi_payoff(phi);
  const Point x = vec({0.1, -0.3, 0.2});
  EXPECT_EQ(J.grad_y(x, vec({0.5, 0, 0})), -phi.value(x));
}

TEST(BaPayoff, ConstantTarget) {
  const Point x0 = vec({2, 0});
  const auto J = ba_payoff(make_constant(x0, 1.0), ConvexSet::ball(1.0));
  const Point x = vec({0.3, 0.4});
  const Point y = vec({-0.5, 0.2});
  EXPECT_NEAR(J.value(x, y), (x0 - x).squaredNorm() - (x0 - y).squaredNorm(), 1e-14);
  EXPECT_LT((J.grad_x(x, y) - 2.0 * (x - x0)).norm(), 1e-14);
}

TEST(BaPayoff, RejectsUnboundedY) {
  const auto Y = ConvexSet::oracle([](const Point& z) { return z; });
  EXPECT_THROW(ba_payoff(make_constant(vec({1, 0}), 1.0), Y), InvalidArgument);
}

TEST(BaPayoff, ValueDependsOnYOnlyThroughDistance) {
  const auto f = fixtures::random_quadratic(8, 2, 1.0);
  const auto J = ba_payoff(f, ConvexSet::ball(1.0));
  Rng rng(9);
  for (int k = 0; k < 100; ++k) {
    const Point x = uniform_in_ball(rng, 2, 1.0);
    const Point y = uniform_in_ball(rng, 2, 1.0);
    const Point fx = f.value(x);
    // rotate y about f(x) by an arbitrary angle
    const double a = 0.1 * k;
    Matrix R(2, 2);
    R << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    const Point y2 = fx + R * (y - fx);
    EXPECT_NEAR(J.value(x, y), J.value(x, y2), 1e-12);
  }
}

TEST(Payoffs, GradientsMatchFiniteDifferences) {
  for (const auto& [name, m] : fixtures::catalog_maps()) {
    SCOPED_TRACE(name);
    const auto vi = gradient_fd_error(vi_payoff(m), 100, 31);
    EXPECT_LE(vi.grad_x_error, 1e-5);
    EXPECT_LE(vi.grad_y_error, 1e-5);
    const auto ba = gradient_fd_error(ba_payoff(m, ConvexSet::ball(m.rho)), 100, 32);
    EXPECT_LE(ba.grad_x_error, 1e-5);
    EXPECT_LE(ba.grad_y_error, 1e-5);
  }
}

TEST(Payoffs, ConcaveInY) {
  for (const auto& [name, m] : fixtures::catalog_maps()) {
    SCOPED_TRACE(name);
    EXPECT_GE(midpoint_concavity_slack(vi_payoff(m), 200, 41), -1e-9);
    EXPECT_GE(midpoint_concavity_slack(ba_payoff(m, ConvexSet::ball(m.rho)), 200, 42), -1e-9);
  }
}

TEST(Payoffs, BilinearAndLinear) {
  Matrix B(1, 1);
  B << 1.0;
  Point lo(1), hi(1);
  lo << 1.0;
  hi << 2.0;
  const auto J = bilinear_payoff(B, Point::Zero(1), 0.3, ConvexSet::box(lo, hi));
  EXPECT_DOUBLE_EQ(J.value(vec({-0.3}), vec({1.5})), -0.45);
  const auto audit = gradient_fd_error(J, 100, 1);
  EXPECT_LE(audit.grad_x_error, 1e-5);
  const auto lin = linear_payoff(vec({1, 0}), 0.5, ConvexSet::ball(1.0));
  EXPECT_DOUBLE_EQ(lin.value(vec({0.5, 0.1}), vec({0, 1})), 0.5);
}
