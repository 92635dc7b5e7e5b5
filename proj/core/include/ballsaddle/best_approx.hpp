#pragma once

#include "ballsaddle/catalog.hpp"
#include "ballsaddle/constants.hpp"
#include "ballsaddle/saddle.hpp"
#include "ballsaddle/vi.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace ballsaddle {

/// ||f(x*) - y*||^2 - (||x* - f(x*)||^2 + ||f(x) - y*||^2 - ||x - f(x)||^2);
/// positive exactly when the strict proximity inequality holds at x.
double proximity_slack(const SmoothMap& f, const Point& x_star, const Point& y_star,
                       const Point& x);
/// The same inequality written as J(x, y*) - J(x*, y*) for
/// J(x, y) = ||f(x) - x||^2 - ||f(x) - y||^2.
double saddle_form_slack(const SmoothMap& f, const Point& x_star, const Point& y_star,
                         const Point& x);

/// Samples B_r (uniform, structured, probes around x*) and checks
/// ||f(x) - x*|| - ||f(x) - x|| <= -strict_margin outside the exclusion ball.
CheckReport check_best_approx_inequality(const SmoothMap& f, const Point& x_star, double r,
                                         std::size_t n_samples, std::uint64_t seed,
                                         double strict_margin = 1e-9,
                                         double exclusion_factor = 1e-4);

struct BACertificate {
  double r = 0.0;
  Point x_star;
  Point y_star;
  /// | ||f(x*) - y*|| - dist(f(x*), T) |
  double dist_gap = 0.0;
  /// Smallest sampled proximity_slack outside the exclusion ball.
  double proximity_margin = 0.0;
  /// ||x* - y*||; set on best-approximation runs only.
  std::optional<double> collapse_gap;
  std::optional<Uniqueness> uniqueness;
  RunMode mode = RunMode::certified;
  ConstantsReport constants;
  SaddlePoint saddle;
  double minimax_gap = 0.0;
  std::vector<CheckReport> checks;

  bool passed() const noexcept { return all_passed(checks); }
};

/// Proximity pair on B_r x T for J(x, y) = ||f(x) - x||^2 - ||f(x) - y||^2 with
/// Y given and T a closed convex subset of Y. Verifies sphere membership,
/// ||f(x*) - y*|| = dist(f(x*), T), the saddle inequalities, and the strict
/// proximity inequality on samples. Throws HypothesisViolation when sigma = 0,
/// when T is not inside Y, or when r exceeds the admissible radius in certified mode.
BACertificate solve_prox_pair(const SmoothMap& f, const ConvexSet& Y, const ConvexSet& T,
                              double r, const ConstantsReport& report, const SaddleConfig& cfg,
                              const SolveOptions& opts = {});

/// Proximity pair with Y = B_rho and T = B_r, then: collapse y* = x*,
/// ||f(x*) - x*|| = dist(f(x*), B_r), x* = P_{B_r}(f(x*)), the strict
/// best-approximation inequality on samples, and uniqueness (multi-start probe
/// plus refutation of candidates by the sample x = x*).
BACertificate solve_best_approx(const SmoothMap& f, double r, const ConstantsReport& report,
                                const SaddleConfig& cfg, const SolveOptions& opts = {});

/// Same radius construction as small_radius, with the best-approximation
/// constants (Y = B_{r*}) of the restricted map.
SmallRadius ba_small_radius(const SmoothMap& f, double epsilon = 0.5);

}  // namespace ballsaddle
