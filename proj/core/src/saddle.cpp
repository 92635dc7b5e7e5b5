#include "ballsaddle/saddle.hpp"

#include "ballsaddle/constants.hpp"
#include "ballsaddle/errors.hpp"
#include "ballsaddle/parallel.hpp"
#include "ballsaddle/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ballsaddle {
namespace {

Point fd_grad_y(const Payoff& J, const Point& x, const Point& y, double h) {
  Point g(y.size());
  for (Eigen::Index j = 0; j < y.size(); ++j) {
    Point yp = y, ym = y;
    yp(j) += h;
    ym(j) -= h;
    g(j) = (J.value(x, yp) - J.value(x, ym)) / (2.0 * h);
  }
  return g;
}

void require_config(const Payoff& J, const SaddleConfig& cfg) {
  if (!(cfg.r > 0.0)) throw InvalidArgument("saddle: r must be positive");
  if (cfg.r > J.x_radius * (1.0 + 1e-12)) throw InvalidArgument("saddle: r exceeds the payoff radius rho");
  if (!(cfg.L >= 0.0)) throw InvalidArgument("saddle: L must be non-negative");
  if (!(cfg.tol > 0.0)) throw InvalidArgument("saddle: tol must be positive");
  if (cfg.step < 0.0) throw InvalidArgument("saddle: step must be non-negative");
  if (auto d = cfg.T.dimension(); d && *d != J.dimension) throw DimensionError("saddle: T has the wrong dimension");
}

}  // namespace

const char* to_string(RunMode m) noexcept {
  return m == RunMode::certified ? "certified" : "heuristic";
}

PhiEval phi_value_grad(const Payoff& J, double L, const Point& x, const Point& y) {
  if (x.size() != J.dimension || y.size() != J.dimension) throw DimensionError("phi: wrong dimension");
  if (x.norm() > J.x_radius * (1.0 + 1e-12)) throw DomainError("phi evaluated outside B_rho");
  PhiEval e;
  e.value = 0.5 * L * x.squaredNorm() + J.value(x, y);
  e.grad_x = L * x + J.grad_x(x, y);
  e.grad_y = J.grad_y ? J.grad_y(x, y) : fd_grad_y(J, x, y, 1e-6 * std::max(J.y_set.diameter(), 1e-12));
  return e;
}

double default_step(const Payoff& J, double L) {
  const double gl = J.grad_lipschitz ? J.grad_lipschitz->value : 0.0;
  const double xl = L + gl;
  const double coupling = J.coupling ? *J.coupling : std::max(1.0, xl);
  const double yl = J.y_lipschitz ? *J.y_lipschitz : std::max(1.0, xl);
  const double ell = std::max(xl, yl) + coupling;
  return 1.0 / (2.0 * std::max(ell, 1e-3));
}

SaddlePoint solve_saddle(const Payoff& J, const SaddleConfig& cfg) {
  require_config(J, cfg);
  const Eigen::Index n = J.dimension;
  const double r = std::min(cfg.r, J.x_radius);
  const double h = 1e-6 * std::max(cfg.T.diameter(), 1e-12);
  auto grads = [&](const Point& x, const Point& y, Point& gx, Point& gy) {
    gx = cfg.L * x + J.grad_x(x, y);
    gy = J.grad_y ? J.grad_y(x, y) : fd_grad_y(J, x, y, h);
  };

  double tau = cfg.step > 0.0 ? cfg.step : default_step(J, cfg.L);
  const double tau_floor = tau * std::ldexp(1.0, -40);
  Point x = cfg.x0 ? project_ball(*cfg.x0, r) : Point::Zero(n);
  Point y = project_set(cfg.y0 ? *cfg.y0 : Point::Zero(n), cfg.T);
  if (x.size() != n || y.size() != n) throw DimensionError("saddle: initial point has the wrong dimension");

  Point gx, gy, gxb, gyb;
  double prev = std::numeric_limits<double>::infinity();
  double res = prev;
  for (std::size_t it = 0; it < cfg.max_iters; ++it) {
    grads(x, y, gx, gy);
    const Point xb = project_ball(x - tau * gx, r);
    const Point yb = project_set(y + tau * gy, cfg.T);
    res = std::sqrt((x - xb).squaredNorm() + (y - yb).squaredNorm());
    if (!std::isfinite(res)) throw NonConvergence("saddle: iteration diverged", res, it);
    if (res <= cfg.tol) {
      SaddlePoint sp{x, y, res, it, tau, true};
      // y* is not unique when J ignores y on T
      Rng rng(0);
      const double jstar = J.value(x, y);
      double spread = 0.0;
      for (int k = 0; k < 8; ++k) {
        const Point yk = sample_in_set(rng, n, cfg.T);
        spread = std::max(spread, std::abs(J.value(x, yk) - jstar));
      }
      sp.y_star_unique = spread > 1e-14 * (1.0 + std::abs(jstar));
      return sp;
    }
    if (res > prev * (1.0 + 1e-6) && tau > tau_floor) {
      tau *= 0.5;
      prev = std::numeric_limits<double>::infinity();
      continue;
    }
    prev = res;
    grads(xb, yb, gxb, gyb);
    x = project_ball(x - tau * gxb, r);
    y = project_set(y + tau * gyb, cfg.T);
  }
  std::ostringstream os;
  os << "saddle: extragradient did not reach tol " << cfg.tol << " in " << cfg.max_iters
     << " iterations (last residual " << res << ")";
  throw NonConvergence(os.str(), res, cfg.max_iters);
}

CheckReport reduce_check(std::string name, const std::vector<Point>& points,
                         const std::vector<double>& values, const std::vector<bool>& skipped,
                         double threshold, bool inclusive) {
  CheckReport rep;
  rep.name = std::move(name);
  rep.threshold = threshold;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!skipped.empty() && skipped[i]) {
      ++rep.excluded;
      continue;
    }
    ++rep.samples;
    rep.worst = std::max(rep.worst, values[i]);
    const bool bad = inclusive ? values[i] > threshold : values[i] >= threshold;
    if (bad && rep.passed) {
      rep.passed = false;
      rep.witness = points[i];
      rep.witness_index = i;
    }
  }
  return rep;
}

CheckReport scalar_check(std::string name, double value, double threshold, const Point& at) {
  CheckReport c;
  c.name = std::move(name);
  c.samples = 1;
  c.worst = value;
  c.threshold = threshold;
  c.passed = value <= threshold;
  if (!c.passed) {
    c.witness = at;
    c.witness_index = 0;
  }
  return c;
}

RunMode resolve_run_mode(const ConstantsReport& report, double r, const SolveOptions& opts) {
  if (!report.hypotheses_hold) {
    throw HypothesisViolation(report.mode == TheoremMode::saddle ? "hypothesis delta > 0 violated"
                                                                 : "hypothesis sigma > 0 violated");
  }
  const RunMode mode = report.certified() ? RunMode::certified : RunMode::heuristic;
  if (mode == RunMode::heuristic && !opts.allow_heuristic) {
    throw HypothesisViolation("constants are sampled lower bounds; rerun in heuristic mode");
  }
  if (!(r > 0.0) || r > report.rho * (1.0 + 1e-12)) throw InvalidArgument("r must lie in (0, rho]");
  if (mode == RunMode::certified && r > report.r_max * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "r = " << r << " exceeds the admissible radius r_max = " << report.r_max;
    throw HypothesisViolation(os.str(), r - report.r_max);
  }
  return mode;
}

bool all_passed(const std::vector<CheckReport>& checks) noexcept {
  return std::all_of(checks.begin(), checks.end(), [](const CheckReport& c) { return c.passed; });
}

std::vector<Point> structured_set_points(Eigen::Index n, const ConvexSet& T) {
  std::vector<Point> pts;
  pts.push_back(project_set(Point::Zero(n), T));
  if (const auto* b = std::get_if<BallSet>(&T.variant())) {
    auto s = structured_points(n, b->radius);
    pts.insert(pts.end(), s.begin() + 1, s.end());
  } else if (const auto* b = std::get_if<BoxSet>(&T.variant())) {
    if (n <= 4) {
      for (unsigned mask = 0; mask < (1u << n); ++mask) {
        Point c(n);
        for (Eigen::Index i = 0; i < n; ++i) c(i) = (mask >> i) & 1u ? b->upper(i) : b->lower(i);
        pts.push_back(c);
      }
    }
  }
  return pts;
}

SaddleCheck check_saddle(const Payoff& J, const SaddlePoint& sp, const SaddleConfig& cfg,
                         std::size_t n_samples, std::uint64_t seed) {
  const Eigen::Index n = J.dimension;
  const Point& xs = sp.x_star;
  const Point& ys = sp.y_star;
  const double r = cfg.r;
  Rng rng(seed);

  std::vector<Point> ypts = structured_set_points(n, cfg.T);
  ypts.push_back(ys);
  std::vector<Point> xpts = structured_points(n, r);
  auto probes = sphere_probes(xs, r);
  xpts.insert(xpts.end(), probes.begin(), probes.end());
  xpts.push_back(xs);
  for (std::size_t k = 0; k < n_samples; ++k) ypts.push_back(sample_in_set(rng, n, cfg.T));
  for (std::size_t k = 0; k < n_samples; ++k) xpts.push_back(uniform_in_ball(rng, n, r));

  const double jstar = J.value(xs, ys);
  const double phistar = 0.5 * cfg.L * xs.squaredNorm() + jstar;
  const double excl = cfg.exclusion_factor * r;

  std::vector<double> yval(ypts.size());
  parallel_for(ypts.size(), [&](std::size_t i) { yval[i] = J.value(xs, ypts[i]) - jstar; });
  std::vector<double> xval(xpts.size());
  std::vector<double> xphi(xpts.size());
  std::vector<bool> xskip(xpts.size());
  parallel_for(xpts.size(), [&](std::size_t i) {
    const double jx = J.value(xpts[i], ys);
    xval[i] = jstar - jx;
    xphi[i] = 0.5 * cfg.L * xpts[i].squaredNorm() + jx;
    xskip[i] = (xpts[i] - xs).norm() <= excl;
  });

  SaddleCheck out;
  out.checks.push_back(reduce_check("saddle.y_maximality", ypts, yval, {}, cfg.check_tol, true));
  out.checks.push_back(
      reduce_check("saddle.x_strict_minimality", xpts, xval, xskip, -cfg.strict_margin, false));

  double ymax = -std::numeric_limits<double>::infinity();
  for (double v : yval) ymax = std::max(ymax, v + phistar);
  double xmin = std::numeric_limits<double>::infinity();
  for (double v : xphi) xmin = std::min(xmin, v);
  out.minimax_gap = ymax - xmin;
  {
    CheckReport gap;
    gap.name = "saddle.minimax_gap";
    gap.samples = ypts.size() + xpts.size();
    gap.worst = out.minimax_gap;
    gap.threshold = 10.0 * cfg.tol;
    gap.passed = out.minimax_gap <= gap.threshold;
    out.checks.push_back(gap);
  }

  // first-order optimality of x* for phi(., y*) on B_r
  {
    const Point g = cfg.L * xs + J.grad_x(xs, ys);
    const double scale = std::max(1.0, g.norm());
    CheckReport kkt;
    kkt.name = "saddle.stationarity";
    kkt.samples = 1;
    const double xn = xs.norm();
    if (xn >= r - 1e-6 && xn > 0.0) {
      const Point u = xs / xn;
      const double lambda = -g.dot(u);
      const double tangential = (g + lambda * u).norm();
      kkt.worst = std::max(tangential, -lambda) / scale;
    } else {
      kkt.worst = g.norm() / scale;
    }
    kkt.threshold = 1e-5;
    kkt.passed = kkt.worst <= kkt.threshold;
    if (!kkt.passed) {
      kkt.witness = xs;
      kkt.witness_index = 0;
    }
    out.checks.push_back(kkt);
  }

  if (cfg.L > 0.0 && cfg.certified_r_max && r <= *cfg.certified_r_max * (1.0 + 1e-12)) {
    CheckReport sphere;
    sphere.name = "saddle.sphere_membership";
    sphere.samples = 1;
    sphere.worst = std::abs(xs.norm() - r);
    sphere.threshold = 1e-6;
    sphere.passed = sphere.worst <= sphere.threshold;
    if (!sphere.passed) {
      sphere.witness = xs;
      sphere.witness_index = 0;
    }
    out.checks.push_back(sphere);
  }
  return out;
}

}  // namespace ballsaddle
