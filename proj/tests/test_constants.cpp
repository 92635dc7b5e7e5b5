#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace ballsaddle;
using fixtures::diag;
using fixtures::vec;

TEST(OpNorm, Examples) {
  EXPECT_NEAR(op_norm(Matrix::Identity(3, 3)), 1.0, 1e-9);
  EXPECT_NEAR(op_norm(diag({2, -3})), 3.0, 1e-9);
  Matrix jordan(2, 2);
  jordan << 0, 1, 0, 0;
  EXPECT_NEAR(op_norm(jordan), 1.0, 1e-9);
  EXPECT_EQ(op_norm(Matrix::Zero(2, 2)), 0.0);
}

TEST(OpNorm, AgreesWithSvd) {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 20; ++k) {
    const Matrix A = fixtures::random_matrix(rng, 5, 1.0);
    const double exact = Eigen::JacobiSVD<Matrix>(A).singularValues()(0);
    EXPECT_NEAR(op_norm(A), exact, 1e-6 * exact);
  }
}

TEST(EstimateTheta, DeclaredValues) {
  const Constant a = estimate_theta(make_affine(diag({2, 1}), Point::Zero(2), 1.0));
  EXPECT_NEAR(a.value, 2.0, 1e-9);
  EXPECT_EQ(a.how, Certification::analytic);
  const Constant c = estimate_theta(make_constant(vec({1, 0}), 1.0));
  EXPECT_EQ(c.value, 0.0);
  EXPECT_EQ(c.how, Certification::analytic);
}

TEST(EstimateTheta, SampledSquare) {
  auto sq = make_quadratic(Matrix::Zero(1, 1), Point::Zero(1), {Matrix::Identity(1, 1)}, 1.0);
  EstimationOptions o;
  o.use_analytic = false;
  const Constant t = estimate_theta(sq, o);
  EXPECT_GE(t.value, 2.0 - 1e-3);
  EXPECT_LE(t.value, 2.0);
  EXPECT_EQ(t.how, Certification::sampled);
  EXPECT_FALSE(t.certified());
}

TEST(EstimateLipschitz, Examples) {
  const auto aff = make_affine(diag({2, 1}), vec({1, 0}), 1.0);
  EXPECT_EQ(estimate_lipschitz(aff.jacobian, 2, 1.0, 200, 0).value, 0.0);
  std::function<Point(const Point&)> shift = [](const Point& x) -> Point { return x - vec({2, 0}); };
  EXPECT_NEAR(estimate_lipschitz(shift, 2, 1.0, 200, 0).value, 1.0, 1e-9);
  std::function<Point(const Point&)> twice = [](const Point& x) -> Point { return 2.0 * x; };
  const Constant g = estimate_lipschitz(twice, 1, 1.0, 1000, 0);
  EXPECT_GE(g.value, 2.0 - 1e-3);
  EXPECT_LE(g.value, 2.0 + 1e-12);
  EXPECT_EQ(g.how, Certification::sampled);
}

TEST(EstimateLipschitz, MonotoneInSampleCount) {
  const auto q = fixtures::random_quadratic(3, 3, 1.0, 0.5);
  double prev = 0.0;
  for (std::size_t pairs : {1u, 10u, 100u, 1000u}) {
    const double v = estimate_lipschitz(q.jacobian, 3, 1.0, pairs, 17).value;
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(Sigma, ViExamples) {
  EXPECT_NEAR(sigma_vi(vec({3, 4}), Matrix::Zero(2, 2), 1.0), 5.0, 1e-10);
  EXPECT_NEAR(sigma_vi(vec({2, 0}), Matrix::Identity(2, 2), 1.0), 1.0, 1e-9);
  Matrix A(2, 2);
  A << 0, 0, 0, 1;
  EXPECT_NEAR(sigma_vi(vec({1, 0}), A, 5.0), 1.0, 1e-9);
}

TEST(Sigma, BaExamples) {
  EXPECT_NEAR(sigma_ba(vec({3, 4}), Matrix::Zero(2, 2), ConvexSet::ball(1.0)), 5.0, 1e-10);
  EXPECT_NEAR(sigma_ba(vec({2, 0}), Matrix::Identity(2, 2), ConvexSet::ball(1.0)), 1.0, 1e-9);
  EXPECT_NEAR(sigma_ba(vec({-1, 0}), Matrix::Identity(2, 2),
                       ConvexSet::box(vec({0, 0}), vec({1, 1}))),
              1.0, 1e-9);
}

TEST(Sigma, VanishesOnReachableOffsets) {
  std::mt19937_64 rng(2);
  Rng urng(3);
  for (int k = 0; k < 10; ++k) {
    const Matrix A = fixtures::random_matrix(rng, 3, 1.0);
    const Point y0 = uniform_in_ball(urng, 3, 0.9);
    EXPECT_LE(sigma_vi(A.transpose() * y0, A, 1.0), 1e-6);
  }
}

TEST(Sigma, OneLipschitzInOffset) {
  std::mt19937_64 rng(4);
  for (int k = 0; k < 20; ++k) {
    const Matrix A = fixtures::random_matrix(rng, 3, 0.7);
    const Point b = fixtures::random_point(rng, 3, 2.0);
    const Point b2 = b + fixtures::random_point(rng, 3, 0.3);
    EXPECT_LE(std::abs(sigma_vi(b, A, 1.0) - sigma_vi(b2, A, 1.0)), (b - b2).norm() + 1e-8);
  }
}

TEST(DeltaConst, Examples) {
  const auto lin = linear_payoff(vec({3, 4}), 1.0, ConvexSet::ball(2.0));
  EXPECT_NEAR(delta_const(lin, lin.y_set).value, 5.0, 1e-10);

  const auto phi = make_affine(Matrix::Identity(2, 2), vec({2, 0}), 1.0);
  const auto vi = vi_payoff(phi);
  EXPECT_NEAR(delta_const(vi, vi.y_set).value, sigma_vi(vec({2, 0}), Matrix::Identity(2, 2), 1.0),
              1e-9);

  const auto ba = ba_payoff(phi, ConvexSet::ball(1.0));
  EXPECT_NEAR(delta_const(ba, ba.y_set).value,
              2.0 * sigma_ba(vec({2, 0}), Matrix::Identity(2, 2), ConvexSet::ball(1.0)), 1e-9);
}

TEST(DeltaConst, SampledWithoutOriginGradient) {
  auto lin = linear_payoff(vec({3, 4}), 1.0, ConvexSet::ball(2.0));
  lin.origin_gradient.reset();
  const Constant d = delta_const(lin, lin.y_set);
  EXPECT_NEAR(d.value, 5.0, 1e-12);
  EXPECT_EQ(d.how, Certification::sampled);
}

TEST(AdmissibleRadius, Examples) {
  ConstantsReport rep;
  rep.mode = TheoremMode::vi;
  rep.sigma = Constant{1.0};
  rep.M = Constant{2.0};
  EXPECT_DOUBLE_EQ(admissible_radius(TheoremMode::vi, rep, 1.0), 0.25);
  rep.M = Constant{0.0};
  EXPECT_DOUBLE_EQ(admissible_radius(TheoremMode::vi, rep, 1.0), 1.0);
  rep.sigma = Constant{0.0};
  EXPECT_THROW(admissible_radius(TheoremMode::vi, rep, 1.0), HypothesisViolation);

  ConstantsReport ba;
  ba.mode = TheoremMode::ba;
  ba.sigma = Constant{2.0};
  ba.L = Constant{2.0};
  EXPECT_DOUBLE_EQ(admissible_radius(TheoremMode::ba, ba, 1.0), 1.0);
  ConstantsReport sd;
  sd.L = Constant{4.0};
  sd.delta = Constant{1.0};
  EXPECT_DOUBLE_EQ(admissible_radius(TheoremMode::saddle, sd, 1.0), 0.125);
  EXPECT_THROW(admissible_radius(TheoremMode::vi, sd, 1.0), InvalidArgument);
}

TEST(Reports, AffineViExact) {
  const auto rep = vi_report(make_affine(Matrix::Identity(2, 2), vec({2, 0}), 1.0));
  EXPECT_NEAR(rep.M->value, 2.0, 1e-9);
  EXPECT_NEAR(rep.sigma->value, 1.0, 1e-9);
  EXPECT_NEAR(rep.r_max, 0.25, 1e-9);
  EXPECT_TRUE(rep.hypotheses_hold);
  EXPECT_TRUE(rep.certified());
}

TEST(Reports, ConstantMapUsesFullRadius) {
  const auto rep = vi_report(make_constant(vec({1, 0}), 1.0));
  EXPECT_EQ(rep.M->value, 0.0);
  EXPECT_DOUBLE_EQ(rep.r_max, 1.0);
}

TEST(Reports, ConstantTargetBestApproximation) {
  const auto rep = ba_report(make_constant(vec({2, 0}), 1.0), ConvexSet::ball(1.0));
  EXPECT_NEAR(rep.eta->value, 1.0, 1e-12);
  EXPECT_NEAR(rep.L->value, 2.0, 1e-12);
  EXPECT_NEAR(rep.sigma->value, 2.0, 1e-9);
  EXPECT_NEAR(rep.delta->value, 4.0, 1e-9);
  EXPECT_NEAR(rep.r_max, 1.0, 1e-9);
}

TEST(Reports, BoxSupNormEntersL) {
  const auto f = make_constant(vec({2, 0}), 1.0);
  const auto rep = ba_report(f, ConvexSet::box(vec({-3, 0}), vec({1, 4})));
  // eta = 1, theta = gamma = 0: L = 2 regardless of the set
  EXPECT_NEAR(rep.L->value, 2.0, 1e-12);
  const auto q = fixtures::norm_squared_map(2, 1.0);
  const auto rq = ba_report(q, ConvexSet::box(vec({-3, 0}), vec({1, 4})));
  const double sup_y = 5.0;
  EXPECT_NEAR(rq.L->value, 2.0 * (rq.eta->value + rq.theta->value + rq.gamma->value * (1.0 + sup_y)),
              1e-12);
}

TEST(Reports, VanishingSigmaFailsHypothesis) {
  const auto rep = vi_report(make_affine(Matrix::Identity(2, 2), Point::Zero(2), 1.0));
  EXPECT_FALSE(rep.hypotheses_hold);
  EXPECT_EQ(rep.r_max, 0.0);
}

TEST(Reports, SampledConstantsAreNotCertified) {
  EstimationOptions o;
  o.use_analytic = false;
  const auto rep = vi_report(fixtures::random_quadratic(5, 2, 1.0), o);
  EXPECT_FALSE(rep.certified());
  EXPECT_EQ(rep.M->how, Certification::sampled);
}

TEST(Reports, RadiusMonotoneInInflatedConstants) {
  for (const auto& [name, m] : fixtures::catalog_maps()) {
    SCOPED_TRACE(name);
    const auto base = vi_report(m);
    if (!base.hypotheses_hold) continue;
    for (double factor : {1.5, 2.0, 4.0}) {
      SmoothMap inflated = m;
      AnalyticConstants k = *m.analytic;
      k.gamma.value *= factor;
      k.theta.value *= factor;
      inflated.analytic = k;
      EXPECT_LE(vi_report(inflated).r_max, base.r_max + 1e-15);
      EXPECT_LE(ba_report(inflated, ConvexSet::ball(m.rho)).r_max,
                ba_report(m, ConvexSet::ball(m.rho)).r_max + 1e-15);
    }
  }
}
