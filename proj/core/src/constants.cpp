#include "ballsaddle/constants.hpp"

#include "ballsaddle/errors.hpp"
#include "ballsaddle/parallel.hpp"
#include "ballsaddle/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace ballsaddle {

const char* to_string(TheoremMode m) noexcept {
  switch (m) {
    case TheoremMode::saddle: return "saddle";
    case TheoremMode::vi: return "vi";
    case TheoremMode::ba: return "ba";
  }
  return "unknown";
}

bool ConstantsReport::certified() const noexcept {
  auto ok = [](const std::optional<Constant>& c) { return !c || c->certified(); };
  switch (mode) {
    case TheoremMode::saddle: return ok(L) && ok(delta);
    case TheoremMode::vi: return ok(M) && ok(sigma);
    case TheoremMode::ba: return ok(L) && ok(sigma);
  }
  return false;
}

namespace {

/// Power iteration on the symmetric PSD matrix B from v; true once the Rayleigh
/// quotient settles to relative 1e-10.
bool power_iterate(const Matrix& B, Point& v, int iters, int& used, double& mu_out) {
  const Eigen::Index n = B.rows();
  double mu_prev = -1.0;
  for (int k = 0; k < iters; ++k, ++used) {
    Point w = B * v;
    const double nw = w.norm();
    if (nw == 0.0) {
      // start vector in the null space of A: perturb and retry
      v = Point::Unit(n, k % n) + 0.1 * v;
      v.normalize();
      continue;
    }
    const double mu = v.dot(w);
    v = w / nw;
    mu_out = mu;
    if (std::abs(mu - mu_prev) <= 1e-10 * std::max(mu, 1e-300)) return true;
    mu_prev = mu;
  }
  return false;
}

}  // namespace

double op_norm(const Matrix& A) {
  if (A.size() == 0) return 0.0;
  if (!A.allFinite()) throw InvalidArgument("op_norm: non-finite matrix");
  if (A.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  const Matrix B = A.transpose() * A;
  const Eigen::Index n = B.rows();
  Point v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = 1.0 + 0.5 * std::sin(1.7 * static_cast<double>(i) + 0.3);
  v.normalize();
  constexpr int kMaxIters = 10000;
  int used = 0;
  double mu = 0.0;
  if (power_iterate(B, v, 500, used, mu)) return (A * v).norm();

  // nearly tied top eigenvalues: restart from v pushed through B^(2^40), built
  // by repeated squaring, which separates them
  Matrix P = B / B.norm();
  for (int k = 0; k < 40; ++k) {
    P = P * P;
    const double s = P.norm();
    if (!(s > 0.0) || !std::isfinite(s)) break;
    P /= s;
  }
  Point u = P * v;
  if (u.norm() == 0.0) {
    Eigen::Index best = 0;
    P.colwise().norm().maxCoeff(&best);
    u = P.col(best);
  }
  if (u.norm() > 0.0) v = u.normalized();
  if (power_iterate(B, v, kMaxIters - used, used, mu)) return (A * v).norm();
  throw NonConvergence("op_norm: power iteration did not converge", mu, static_cast<std::size_t>(used));
}

namespace {

std::vector<Point> theta_points(Eigen::Index n, double rho, std::size_t samples) {
  std::vector<Point> pts = structured_points(n, rho);
  auto h = halton_ball_points(n, rho, samples);
  pts.insert(pts.end(), h.begin(), h.end());
  return pts;
}

std::vector<std::pair<Point, Point>> lipschitz_pairs(Eigen::Index n, double rho, std::size_t pairs,
                                                     std::uint64_t seed) {
  std::vector<std::pair<Point, Point>> out;
  const auto s = structured_points(n, rho);
  for (std::size_t i = 1; i < s.size(); ++i) out.emplace_back(s[0], s[i]);
  Rng rng(seed);
  for (std::size_t k = 0; k < pairs; ++k) {
    Point a = uniform_in_ball(rng, n, rho);
    Point b = uniform_in_ball(rng, n, rho);
    out.emplace_back(std::move(a), std::move(b));
  }
  return out;
}

template <class Diff>
Constant max_ratio(const std::vector<std::pair<Point, Point>>& pairs, Diff diff) {
  std::vector<double> ratio(pairs.size(), 0.0);
  parallel_for(pairs.size(), [&](std::size_t i) {
    const double d = (pairs[i].first - pairs[i].second).norm();
    if (d > 0.0) ratio[i] = diff(pairs[i].first, pairs[i].second) / d;
  });
  double best = 0.0;
  for (double r : ratio) best = std::max(best, r);
  return Constant{best, Certification::sampled};
}

}  // namespace

Constant estimate_theta(const SmoothMap& map, const EstimationOptions& opts) {
  if (opts.use_analytic && map.analytic) return map.analytic->theta;
  const auto pts = theta_points(map.dimension, map.rho, opts.samples);
  std::vector<double> norms(pts.size(), 0.0);
  parallel_for(pts.size(), [&](std::size_t i) { norms[i] = op_norm(map.jacobian(pts[i])); });
  return Constant{*std::max_element(norms.begin(), norms.end()), Certification::sampled};
}

Constant estimate_lipschitz(const std::function<Point(const Point&)>& G, Eigen::Index n,
                            double rho, std::size_t pairs, std::uint64_t seed) {
  if (pairs < 1) throw InvalidArgument("estimate_lipschitz needs at least one pair");
  return max_ratio(lipschitz_pairs(n, rho, pairs, seed),
                   [&G](const Point& a, const Point& b) { return (G(a) - G(b)).norm(); });
}

Constant estimate_lipschitz(const std::function<Matrix(const Point&)>& G, Eigen::Index n,
                            double rho, std::size_t pairs, std::uint64_t seed) {
  if (pairs < 1) throw InvalidArgument("estimate_lipschitz needs at least one pair");
  return max_ratio(lipschitz_pairs(n, rho, pairs, seed),
                   [&G](const Point& a, const Point& b) { return op_norm(G(a) - G(b)); });
}

Constant estimate_gamma(const SmoothMap& map, const EstimationOptions& opts) {
  if (opts.use_analytic && map.analytic) return map.analytic->gamma;
  return estimate_lipschitz(map.jacobian, map.dimension, map.rho, opts.samples, opts.seed);
}

Constant estimate_eta(const SmoothMap& map, const EstimationOptions& opts) {
  if (opts.use_analytic && map.analytic && map.analytic->eta) return *map.analytic->eta;
  auto F = map.value;
  std::function<Point(const Point&)> residual = [F](const Point& x) -> Point { return x - F(x); };
  return estimate_lipschitz(residual, map.dimension, map.rho, opts.samples, opts.seed);
}

double min_affine_norm(const Point& offset, const Matrix& linear, const ConvexSet& Y) {
  require_finite(offset, "offset");
  if (linear.rows() != offset.size()) throw DimensionError("min_affine_norm: shape mismatch");
  const double k = op_norm(linear);
  const Eigen::Index m = linear.cols();
  Point y = project_set(Point::Zero(m), Y);
  if (k == 0.0) return offset.norm();
  const double step = 1.0 / (2.0 * k * k);
  constexpr std::size_t kMaxIters = 100000;
  double gm = 0.0;
  for (std::size_t it = 0; it < kMaxIters; ++it) {
    const Point grad = 2.0 * linear.transpose() * (offset + linear * y);
    Point next = project_set(y - step * grad, Y);
    gm = (next - y).norm() / step;
    y = std::move(next);
    if (gm <= 1e-10) return (offset + linear * y).norm();
  }
  throw NonConvergence("projected gradient for sigma/delta did not converge", gm, kMaxIters);
}

double sigma_vi(const Point& phi0, const Matrix& jac0, double rho) {
  return min_affine_norm(phi0, -jac0.transpose(), ConvexSet::ball(rho));
}

double sigma_ba(const Point& f0, const Matrix& jac0, const ConvexSet& Y) {
  if (!Y.bounded()) throw InvalidArgument("sigma_ba: Y must be bounded");
  return min_affine_norm(-f0, jac0.transpose(), Y);
}

Constant delta_const(const Payoff& J, const ConvexSet& Y, const EstimationOptions& opts) {
  if (J.origin_gradient) {
    return Constant{min_affine_norm(J.origin_gradient->offset, J.origin_gradient->linear, Y),
                    Certification::analytic};
  }
  Rng rng(opts.seed);
  const Point zero = Point::Zero(J.dimension);
  std::vector<Point> ys;
  ys.push_back(project_set(zero, Y));
  for (std::size_t k = 0; k < opts.samples; ++k) ys.push_back(sample_in_set(rng, J.dimension, Y));
  std::vector<double> g(ys.size());
  parallel_for(ys.size(), [&](std::size_t i) { g[i] = J.grad_x(zero, ys[i]).norm(); });
  return Constant{*std::min_element(g.begin(), g.end()), Certification::sampled};
}

double admissible_radius(TheoremMode mode, const ConstantsReport& report, double rho) {
  const std::optional<Constant>* num = nullptr;
  const std::optional<Constant>* den = nullptr;
  double den_scale = 1.0;
  switch (mode) {
    case TheoremMode::saddle: num = &report.delta; den = &report.L; den_scale = 2.0; break;
    case TheoremMode::vi: num = &report.sigma; den = &report.M; den_scale = 2.0; break;
    case TheoremMode::ba: num = &report.sigma; den = &report.L; den_scale = 1.0; break;
  }
  if (!num->has_value() || !den->has_value()) {
    throw InvalidArgument(std::string("admissible_radius: constants missing for ") + to_string(mode));
  }
  if (!((*num)->value > kTolerance)) {
    throw HypothesisViolation(mode == TheoremMode::saddle ? "hypothesis delta > 0 violated"
                                                          : "hypothesis sigma > 0 violated");
  }
  const double d = den_scale * (*den)->value;
  if (d == 0.0) return rho;
  return std::min(rho, (*num)->value / d);
}

namespace {

void finish(ConstantsReport& rep) {
  try {
    rep.r_max = admissible_radius(rep.mode, rep, rep.rho);
    rep.hypotheses_hold = true;
  } catch (const HypothesisViolation&) {
    rep.r_max = 0.0;
    rep.hypotheses_hold = false;
  }
}

}  // namespace

ConstantsReport vi_report(const SmoothMap& phi, const EstimationOptions& opts) {
  ConstantsReport rep;
  rep.mode = TheoremMode::vi;
  rep.rho = phi.rho;
  rep.theta = estimate_theta(phi, opts);
  rep.gamma = estimate_gamma(phi, opts);
  rep.eta = estimate_eta(phi, opts);
  rep.M = Constant{2.0 * (rep.theta->value + phi.rho * rep.gamma->value),
                   weakest(rep.theta->how, rep.gamma->how)};
  const Point zero = Point::Zero(phi.dimension);
  const double s = sigma_vi(phi.value(zero), phi.jacobian(zero), phi.rho);
  rep.sigma = Constant{s, Certification::analytic};
  rep.delta = rep.sigma;
  finish(rep);
  return rep;
}

ConstantsReport ba_report(const SmoothMap& f, const ConvexSet& Y, const EstimationOptions& opts) {
  ConstantsReport rep;
  rep.mode = TheoremMode::ba;
  rep.rho = f.rho;
  rep.theta = estimate_theta(f, opts);
  rep.gamma = estimate_gamma(f, opts);
  rep.eta = estimate_eta(f, opts);
  const double sup_y = Y.sup_norm();
  rep.L = Constant{2.0 * (rep.eta->value + rep.theta->value + rep.gamma->value * (f.rho + sup_y)),
                   weakest(weakest(rep.theta->how, rep.gamma->how), rep.eta->how)};
  const Point zero = Point::Zero(f.dimension);
  const double s = sigma_ba(f.value(zero), f.jacobian(zero), Y);
  rep.sigma = Constant{s, Certification::analytic};
  rep.delta = Constant{2.0 * s, Certification::analytic};
  finish(rep);
  return rep;
}

ConstantsReport saddle_report(const Payoff& J, const EstimationOptions& opts) {
  ConstantsReport rep;
  rep.mode = TheoremMode::saddle;
  rep.rho = J.x_radius;
  if (opts.use_analytic && J.grad_lipschitz) {
    rep.L = *J.grad_lipschitz;
  } else {
    // sampled over a handful of y's: max over y of the Lipschitz constant in x
    Rng rng(opts.seed);
    double best = 0.0;
    for (int k = 0; k < 8; ++k) {
      const Point y = sample_in_set(rng, J.dimension, J.y_set);
      auto gx = J.grad_x;
      std::function<Point(const Point&)> G = [gx, y](const Point& x) -> Point { return gx(x, y); };
      best = std::max(best, estimate_lipschitz(G, J.dimension, J.x_radius,
                                               std::max<std::size_t>(1, opts.samples / 8),
                                               opts.seed + static_cast<std::uint64_t>(k) + 1)
                                .value);
    }
    rep.L = Constant{best, Certification::sampled};
  }
  rep.delta = delta_const(J, J.y_set, opts);
  finish(rep);
  return rep;
}

}  // namespace ballsaddle
