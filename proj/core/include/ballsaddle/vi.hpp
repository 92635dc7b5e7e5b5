#pragma once

#include "ballsaddle/catalog.hpp"
#include "ballsaddle/constants.hpp"
#include "ballsaddle/saddle.hpp"

#include <cstdint>
#include <vector>

namespace ballsaddle {

/// Sampled verdicts for the two-sided inequality
///   max{<F(x*), x* - x>, <F(x), x* - x>} < 0   for x in B_r \ {x*}.
struct VICheck {
  CheckReport first;   ///< <F(x*), x* - x>
  CheckReport second;  ///< <F(x), x* - x>
  /// -max of the two forms at the antipode -x*.
  double antipode_margin = 0.0;
};

/// Samples n_samples uniform points of B_r plus the antipode, the structured
/// points and probes on S_r around x*; points within exclusion_factor * r of x*
/// are skipped. Both forms must be <= -strict_margin.
VICheck check_vi(const SmoothMap& phi, const Point& x_star, double r, std::size_t n_samples,
                 std::uint64_t seed, double strict_margin = 1e-9, double exclusion_factor = 1e-4);

/// True when the single sample x* already rules out `candidate` as a solution:
/// max{<F(c), c - x*>, <F(x*), c - x*>} >= 0.
bool vi_candidate_refuted(const SmoothMap& phi, const Point& candidate, const Point& x_star);

struct VICertificate {
  double r = 0.0;
  Point x_star;
  Point y_star;
  double collapse_gap = 0.0;  ///< ||x* - y*||
  double first = 0.0;         ///< max sampled <F(x*), x* - x>
  double second = 0.0;        ///< max sampled <F(x), x* - x>
  double antipode_margin = 0.0;
  double phi_norm = 0.0;      ///< ||F(x*)||
  Uniqueness uniqueness;
  RunMode mode = RunMode::certified;
  ConstantsReport constants;
  SaddlePoint saddle;
  double minimax_gap = 0.0;
  std::vector<CheckReport> checks;

  bool passed() const noexcept { return all_passed(checks); }
};

/// Solves the variational inequality on B_r through the saddle problem of
/// J(x, y) = <F(x), x - y> with L = M and T = B_r, then verifies collapse
/// x* = y*, F(x*) != 0, sphere membership, both inequality forms, and
/// uniqueness (multi-start probe plus refutation of rotated candidates).
/// Throws HypothesisViolation when sigma = 0, when r exceeds the admissible
/// radius in certified mode, or when constants are sampled and heuristic runs
/// are not allowed.
VICertificate solve_vi(const SmoothMap& phi, double r, const ConstantsReport& report,
                       const SaddleConfig& cfg, const SolveOptions& opts = {});

/// Solves for F = Psi - w. Requires Psi'(0) = 0 (within 1e-10) and
/// ||w - Psi(0)|| >= 2 M1 rho with M1 = 2(theta1 + rho gamma1); any r in (0, rho]
/// is then admissible. Violations throw HypothesisViolation carrying the deficit.
VICertificate solve_vi_shifted(const SmoothMap& psi, const Point& w, double r,
                               const SaddleConfig& cfg, const SolveOptions& opts = {});

struct SmallRadius {
  double r_star = 0.0;
  SmoothMap map;  ///< the map restricted to B_{r*}
  ConstantsReport report;
};

/// r* = min{rho, (1 - epsilon) ||F(0)|| / ||F'(0)||}, which keeps
/// inf_{||y|| <= r*} ||F(0) - F'(0)^T y|| >= epsilon ||F(0)||; returns the
/// variational-inequality constants of the map restricted to B_{r*}.
/// Throws HypothesisViolation when F(0) = 0.
SmallRadius small_radius(const SmoothMap& map, double epsilon = 0.5);

}  // namespace ballsaddle
