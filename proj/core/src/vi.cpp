#include "ballsaddle/vi.hpp"

#include "ballsaddle/errors.hpp"
#include "ballsaddle/oracle.hpp"
#include "ballsaddle/parallel.hpp"
#include "ballsaddle/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ballsaddle {

VICheck check_vi(const SmoothMap& phi, const Point& x_star, double r, std::size_t n_samples,
                 std::uint64_t seed, double strict_margin, double exclusion_factor) {
  const Eigen::Index n = phi.dimension;
  Rng rng(seed);
  std::vector<Point> pts;
  pts.push_back(-x_star);
  auto s = structured_points(n, r);
  pts.insert(pts.end(), s.begin(), s.end());
  auto probes = sphere_probes(x_star, r);
  pts.insert(pts.end(), probes.begin(), probes.end());
  for (std::size_t k = 0; k < n_samples; ++k) pts.push_back(uniform_in_ball(rng, n, r));

  const Point fstar = phi.value(x_star);
  const double excl = exclusion_factor * r;
  std::vector<double> first(pts.size()), second(pts.size());
  std::vector<bool> skip(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    const Point d = x_star - pts[i];
    first[i] = fstar.dot(d);
    second[i] = phi.value(pts[i]).dot(d);
    skip[i] = d.norm() <= excl;
  });
  VICheck out;
  out.first = reduce_check("vi.first_form", pts, first, skip, -strict_margin, false);
  out.second = reduce_check("vi.second_form", pts, second, skip, -strict_margin, false);
  out.antipode_margin = -std::max(first[0], second[0]);
  return out;
}

bool vi_candidate_refuted(const SmoothMap& phi, const Point& candidate, const Point& x_star) {
  const Point d = candidate - x_star;
  return std::max(phi.value(candidate).dot(d), phi.value(x_star).dot(d)) >= 0.0;
}

VICertificate solve_vi(const SmoothMap& phi, double r, const ConstantsReport& report,
                       const SaddleConfig& cfg, const SolveOptions& opts) {
  if (report.mode != TheoremMode::vi || !report.M || !report.theta) {
    throw InvalidArgument("solve_vi needs a variational-inequality constants report");
  }
  VICertificate cert;
  cert.mode = resolve_run_mode(report, r, opts);
  cert.r = r;
  cert.constants = report;

  const Payoff J = vi_payoff(phi, *report.M, report.theta->value);
  SaddleConfig sc = cfg;
  sc.r = r;
  sc.T = ConvexSet::ball(r);
  sc.L = report.M->value;
  sc.certified_r_max.reset();
  if (cert.mode == RunMode::certified) sc.certified_r_max = report.r_max;

  cert.saddle = solve_saddle(J, sc);
  cert.x_star = cert.saddle.x_star;
  cert.y_star = cert.saddle.y_star;
  const SaddleCheck sch = check_saddle(J, cert.saddle, sc, opts.check_samples, opts.seed);
  cert.minimax_gap = sch.minimax_gap;
  cert.checks = sch.checks;

  cert.collapse_gap = (cert.x_star - cert.y_star).norm();
  cert.checks.push_back(scalar_check("vi.collapse", cert.collapse_gap, 1e-6, cert.y_star));
  cert.phi_norm = phi.value(cert.x_star).norm();
  cert.checks.push_back(scalar_check("vi.phi_nonzero", -cert.phi_norm, -1e-9, cert.x_star));
  cert.checks.push_back(
      scalar_check("vi.sphere", std::abs(cert.x_star.norm() - r), 1e-6, cert.x_star));

  VICheck vc = check_vi(phi, cert.x_star, r, opts.check_samples, opts.seed + 1, sc.strict_margin,
                        sc.exclusion_factor);
  cert.first = vc.first.worst;
  cert.second = vc.second.worst;
  cert.antipode_margin = vc.antipode_margin;
  cert.checks.push_back(std::move(vc.first));
  cert.checks.push_back(std::move(vc.second));

  // uniqueness: independent random starts must agree on x*
  if (opts.uniqueness_starts >= 2) {
    const Eigen::Index n = phi.dimension;
    auto solver = [&](std::uint64_t s) -> Point {
      Rng rng(s);
      SaddleConfig c = sc;
      c.x0 = uniform_in_ball(rng, n, r);
      c.y0 = uniform_in_ball(rng, n, r);
      return solve_saddle(J, c).x_star;
    };
    cert.uniqueness.starts = opts.uniqueness_starts;
    cert.uniqueness.max_pairwise = uniqueness_probe(solver, opts.uniqueness_starts, opts.seed);
    cert.checks.push_back(scalar_check("vi.uniqueness_probe", cert.uniqueness.max_pairwise, 1e-5,
                                       cert.x_star));
  }
  // no rotated candidate on S_r can satisfy the inequality once x* does
  auto probes = sphere_probes(cert.x_star, r);
  const std::size_t m = std::min<std::size_t>(16, probes.size());
  cert.uniqueness.candidates = m;
  std::optional<Point> unrefuted;
  for (std::size_t i = 0; i < m; ++i) {
    // spread the 16 picks over the probe ladder
    const std::size_t k = (i * probes.size()) / m;
    if (vi_candidate_refuted(phi, probes[k], cert.x_star)) {
      ++cert.uniqueness.refuted;
    } else if (!unrefuted) {
      unrefuted = probes[k];
    }
  }
  CheckReport refute;
  refute.name = "vi.candidates_refuted";
  refute.samples = m;
  refute.worst = static_cast<double>(m - cert.uniqueness.refuted);
  refute.threshold = 0.0;
  refute.passed = cert.uniqueness.refuted == m;
  if (unrefuted) refute.witness = *unrefuted;
  cert.checks.push_back(std::move(refute));
  return cert;
}

VICertificate solve_vi_shifted(const SmoothMap& psi, const Point& w, double r,
                               const SaddleConfig& cfg, const SolveOptions& opts) {
  if (w.size() != psi.dimension) throw DimensionError("w has the wrong dimension");
  const Point zero = Point::Zero(psi.dimension);
  const double jac0 = psi.jacobian(zero).cwiseAbs().maxCoeff();
  if (jac0 > 1e-10) {
    std::ostringstream os;
    os << "hypothesis violated: Psi'(0) must vanish (max entry " << jac0 << ")";
    throw HypothesisViolation(os.str(), jac0);
  }
  if (!(r > 0.0) || r > psi.rho * (1.0 + 1e-12)) throw InvalidArgument("r must lie in (0, rho]");
  const EstimationOptions eo{1000, opts.seed, true};
  const Constant theta1 = estimate_theta(psi, eo);
  const Constant gamma1 = estimate_gamma(psi, eo);
  const double M1 = 2.0 * (theta1.value + psi.rho * gamma1.value);
  const double lhs = (w - psi.value(zero)).norm();
  const double rhs = 2.0 * M1 * psi.rho;
  if (lhs < rhs) {
    std::ostringstream os;
    os << "condition ||w - Psi(0)|| >= 2 M1 rho violated: " << lhs << " < " << rhs
       << " (deficit " << rhs - lhs << ")";
    throw HypothesisViolation(os.str(), rhs - lhs);
  }
  const SmoothMap phi = shifted(psi, w);
  const ConstantsReport report = vi_report(phi, eo);
  return solve_vi(phi, r, report, cfg, opts);
}

SmallRadius small_radius(const SmoothMap& map, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidArgument("epsilon must lie in (0, 1)");
  const Point zero = Point::Zero(map.dimension);
  const double f0 = map.value(zero).norm();
  if (f0 <= 1e-9) {
    throw HypothesisViolation("small-radius equivalence fails: the map vanishes at 0");
  }
  const double a = op_norm(map.jacobian(zero));
  SmallRadius out;
  out.r_star = std::min(map.rho, (1.0 - epsilon) * f0 / std::max(a, 1e-12));
  out.map = restricted(map, out.r_star);
  out.report = vi_report(out.map);
  return out;
}

}  // namespace ballsaddle
