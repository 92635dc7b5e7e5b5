#include "ballsaddle/best_approx.hpp"

#include "ballsaddle/errors.hpp"
#include "ballsaddle/oracle.hpp"
#include "ballsaddle/parallel.hpp"
#include "ballsaddle/sampling.hpp"

#include <algorithm>
#include <cmath>

namespace ballsaddle {

double proximity_slack(const SmoothMap& f, const Point& x_star, const Point& y_star,
                       const Point& x) {
  const Point fs = f.value(x_star);
  const Point fx = f.value(x);
  const double lhs = (x_star - fs).squaredNorm() + (fx - y_star).squaredNorm() - (x - fx).squaredNorm();
  return (fs - y_star).squaredNorm() - lhs;
}

double saddle_form_slack(const SmoothMap& f, const Point& x_star, const Point& y_star,
                         const Point& x) {
  const Point fs = f.value(x_star);
  const Point fx = f.value(x);
  const double j_star = (fs - x_star).squaredNorm() - (fs - y_star).squaredNorm();
  const double j_x = (fx - x).squaredNorm() - (fx - y_star).squaredNorm();
  return j_x - j_star;
}

namespace {

std::vector<Point> ball_samples(const Point& x_star, double r, std::size_t n_samples,
                                std::uint64_t seed) {
  const Eigen::Index n = x_star.size();
  std::vector<Point> pts = structured_points(n, r);
  auto probes = sphere_probes(x_star, r);
  pts.insert(pts.end(), probes.begin(), probes.end());
  Rng rng(seed);
  for (std::size_t k = 0; k < n_samples; ++k) pts.push_back(uniform_in_ball(rng, n, r));
  return pts;
}

void require_subset(const ConvexSet& T, const ConvexSet& Y, Eigen::Index n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Point> pts = structured_set_points(n, T);
  for (int k = 0; k < 256; ++k) pts.push_back(sample_in_set(rng, n, T));
  for (const auto& p : pts) {
    if (!Y.contains(p, 1e-9)) throw HypothesisViolation("T is not contained in Y");
  }
}

}  // namespace

CheckReport check_best_approx_inequality(const SmoothMap& f, const Point& x_star, double r,
                                         std::size_t n_samples, std::uint64_t seed,
                                         double strict_margin, double exclusion_factor) {
  const auto pts = ball_samples(x_star, r, n_samples, seed);
  const double excl = exclusion_factor * r;
  std::vector<double> val(pts.size());
  std::vector<bool> skip(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    const Point fx = f.value(pts[i]);
    val[i] = (fx - x_star).norm() - (fx - pts[i]).norm();
    skip[i] = (pts[i] - x_star).norm() <= excl;
  });
  return reduce_check("ba.strict_best_approximation", pts, val, skip, -strict_margin, false);
}

BACertificate solve_prox_pair(const SmoothMap& f, const ConvexSet& Y, const ConvexSet& T,
                              double r, const ConstantsReport& report, const SaddleConfig& cfg,
                              const SolveOptions& opts) {
  if (report.mode != TheoremMode::ba || !report.L || !report.theta) {
    throw InvalidArgument("solve_prox_pair needs a best-approximation constants report");
  }
  BACertificate cert;
  cert.mode = resolve_run_mode(report, r, opts);
  require_subset(T, Y, f.dimension, opts.seed);
  cert.r = r;
  cert.constants = report;

  const Payoff J = ba_payoff(f, Y, *report.L, report.theta->value);
  SaddleConfig sc = cfg;
  sc.r = r;
  sc.T = T;
  sc.L = report.L->value;
  sc.certified_r_max.reset();
  if (cert.mode == RunMode::certified) sc.certified_r_max = report.r_max;

  cert.saddle = solve_saddle(J, sc);
  cert.x_star = cert.saddle.x_star;
  cert.y_star = cert.saddle.y_star;
  const SaddleCheck sch = check_saddle(J, cert.saddle, sc, opts.check_samples, opts.seed);
  cert.minimax_gap = sch.minimax_gap;
  cert.checks = sch.checks;

  const Point fs = f.value(cert.x_star);
  const double dist_T = (fs - project_set(fs, T)).norm();
  cert.dist_gap = std::abs((fs - cert.y_star).norm() - dist_T);
  cert.checks.push_back(scalar_check("ba.distance_identity", cert.dist_gap, 1e-6, cert.y_star));
  cert.checks.push_back(
      scalar_check("ba.sphere", std::abs(cert.x_star.norm() - r), 1e-6, cert.x_star));

  const auto pts = ball_samples(cert.x_star, r, opts.check_samples, opts.seed + 1);
  const double excl = sc.exclusion_factor * r;
  std::vector<double> val(pts.size());
  std::vector<bool> skip(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    val[i] = -proximity_slack(f, cert.x_star, cert.y_star, pts[i]);
    skip[i] = (pts[i] - cert.x_star).norm() <= excl;
  });
  CheckReport prox = reduce_check("ba.proximity_inequality", pts, val, skip, -sc.strict_margin, false);
  cert.proximity_margin = -prox.worst;
  cert.checks.push_back(std::move(prox));
  return cert;
}

BACertificate solve_best_approx(const SmoothMap& f, double r, const ConstantsReport& report,
                                const SaddleConfig& cfg, const SolveOptions& opts) {
  const ConvexSet Y = ConvexSet::ball(f.rho);
  BACertificate cert = solve_prox_pair(f, Y, ConvexSet::ball(r), r, report, cfg, opts);
  const Point& xs = cert.x_star;
  const Point fs = f.value(xs);

  cert.collapse_gap = (xs - cert.y_star).norm();
  cert.checks.push_back(scalar_check("ba.collapse", *cert.collapse_gap, 1e-6, cert.y_star));
  cert.checks.push_back(scalar_check("ba.best_approximation_identity",
                                     std::abs((fs - xs).norm() - dist_ball(fs, r)), 1e-6, xs));
  cert.checks.push_back(
      scalar_check("ba.projection_identity", (xs - project_ball(fs, r)).norm(), 1e-6, xs));
  cert.checks.push_back(check_best_approx_inequality(f, xs, r, opts.check_samples, opts.seed + 2,
                                                     cfg.strict_margin, cfg.exclusion_factor));

  Uniqueness u;
  if (opts.uniqueness_starts >= 2) {
    const Payoff J = ba_payoff(f, Y, *report.L, report.theta->value);
    SaddleConfig sc = cfg;
    sc.r = r;
    sc.T = ConvexSet::ball(r);
    sc.L = report.L->value;
    const Eigen::Index n = f.dimension;
    auto solver = [&](std::uint64_t s) -> Point {
      Rng rng(s);
      SaddleConfig c = sc;
      c.x0 = uniform_in_ball(rng, n, r);
      c.y0 = uniform_in_ball(rng, n, r);
      return solve_saddle(J, c).x_star;
    };
    u.starts = opts.uniqueness_starts;
    u.max_pairwise = uniqueness_probe(solver, opts.uniqueness_starts, opts.seed);
    cert.checks.push_back(scalar_check("ba.uniqueness_probe", u.max_pairwise, 1e-5, xs));
  }
  // a competing x0 would need ||f(x*) - x0|| < ||f(x*) - x*||, impossible for
  // the nearest point x* of B_r to f(x*)
  std::vector<Point> cands;
  auto probes = sphere_probes(xs, r);
  for (std::size_t i = 0; i < probes.size() && cands.size() < 8; i += std::max<std::size_t>(1, probes.size() / 8)) {
    cands.push_back(probes[i]);
  }
  Rng rng(opts.seed + 3);
  while (cands.size() < 16) cands.push_back(uniform_in_ball(rng, f.dimension, r));
  u.candidates = cands.size();
  std::optional<Point> unrefuted;
  const double best = (fs - xs).norm();
  for (const auto& c : cands) {
    if ((fs - c).norm() >= best - 1e-12) {
      ++u.refuted;
    } else if (!unrefuted) {
      unrefuted = c;
    }
  }
  CheckReport refute;
  refute.name = "ba.candidates_refuted";
  refute.samples = u.candidates;
  refute.worst = static_cast<double>(u.candidates - u.refuted);
  refute.threshold = 0.0;
  refute.passed = u.refuted == u.candidates;
  if (unrefuted) refute.witness = *unrefuted;
  cert.checks.push_back(std::move(refute));
  cert.uniqueness = u;
  return cert;
}

SmallRadius ba_small_radius(const SmoothMap& f, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidArgument("epsilon must lie in (0, 1)");
  const Point zero = Point::Zero(f.dimension);
  const double f0 = f.value(zero).norm();
  if (f0 <= 1e-9) {
    throw HypothesisViolation("small-radius equivalence fails: f(0) = 0");
  }
  const double a = op_norm(f.jacobian(zero));
  SmallRadius out;
  out.r_star = std::min(f.rho, (1.0 - epsilon) * f0 / std::max(a, 1e-12));
  out.map = restricted(f, out.r_star);
  out.report = ba_report(out.map, ConvexSet::ball(out.r_star));
  return out;
}

}  // namespace ballsaddle
