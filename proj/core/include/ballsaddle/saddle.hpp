#pragma once

#include "ballsaddle/catalog.hpp"
#include "ballsaddle/constants.hpp"
#include "ballsaddle/hilbert.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace ballsaddle {

/// Settings for the regularised saddle problem
///   phi(x, y) = (L/2) ||x||^2 + J(x, y)  on  B_r x T.
struct SaddleConfig {
  double r = 0.0;
  ConvexSet T = ConvexSet::ball(1.0);
  /// Regularisation weight; phi(., y) is convex once L dominates the
  /// Lipschitz constant of grad_x J.
  double L = 0.0;
  /// Extragradient step; 0 selects 1 / (2 l_phi) from the payoff's constants.
  double step = 0.0;
  double tol = 1e-8;
  std::size_t max_iters = 1'000'000;
  /// Strict inequalities are checked as "<= -strict_margin".
  double strict_margin = 1e-9;
  /// Slack for the non-strict inequalities.
  double check_tol = 1e-7;
  /// Points closer than exclusion_factor * r to x* are skipped by strict checks.
  double exclusion_factor = 1e-4;
  /// Admissible radius when the run is certified; enables the sphere check.
  std::optional<double> certified_r_max;
  std::optional<Point> x0;
  std::optional<Point> y0;
};

struct SaddlePoint {
  Point x_star;
  Point y_star;
  /// Fixed-point residual ||(x - P(x - t grad_x), y - P_T(y + t grad_y))||.
  double residual = 0.0;
  std::size_t iterations = 0;
  double step = 0.0;
  /// False when J does not depend on y, so every y in T is a valid y*.
  bool y_star_unique = true;
};

struct PhiEval {
  double value = 0.0;
  Point grad_x;
  Point grad_y;
};

/// Value and gradients of the regularised payoff. grad_y comes from the payoff
/// when available, otherwise from central differences (step 1e-6 diam T).
/// Throws DomainError when ||x|| exceeds the payoff's radius.
PhiEval phi_value_grad(const Payoff& J, double L, const Point& x, const Point& y);

/// 1 / (2 l_phi) with l_phi = max(L + grad-Lipschitz, y-Lipschitz) + coupling.
double default_step(const Payoff& J, double L);

/// Extragradient on phi over B_r x T, started from (x0, P_T(y0)) (defaults 0
/// and P_T(0)). Halves the step when the residual grows. Throws
/// NonConvergence after max_iters.
SaddlePoint solve_saddle(const Payoff& J, const SaddleConfig& cfg);

/// Outcome of one sampled verification. `worst` is the largest value of the
/// checked quantity; the check passes when it stays below `threshold`.
struct CheckReport {
  std::string name;
  bool passed = true;
  std::size_t samples = 0;
  std::size_t excluded = 0;
  double worst = -std::numeric_limits<double>::infinity();
  double threshold = 0.0;
  std::optional<Point> witness;
  std::optional<std::size_t> witness_index;
};

/// Builds a CheckReport from per-sample values: fails at the first sample
/// whose value is >= threshold (or > threshold when `inclusive`).
CheckReport reduce_check(std::string name, const std::vector<Point>& points,
                         const std::vector<double>& values, const std::vector<bool>& skipped,
                         double threshold, bool inclusive);

bool all_passed(const std::vector<CheckReport>& checks) noexcept;

struct SaddleCheck {
  std::vector<CheckReport> checks;
  /// max_y phi(x*, y) - min_x phi(x, y*) over the samples.
  double minimax_gap = 0.0;
  bool passed() const noexcept { return all_passed(checks); }
};

/// Samples n_samples points of T and of B_r (plus structured points and
/// probes on S_r around x*) and verifies
///   J(x*, y) <= J(x*, y*) + check_tol,
///   J(x*, y*) - J(x, y*) <= -strict_margin for ||x - x*|| > exclusion,
/// the first-order optimality of x* for phi(., y*) on B_r, the sampled minimax
/// gap <= 10 tol, and |‖x*‖ - r| <= 1e-6 when L > 0 and r <= certified_r_max.
SaddleCheck check_saddle(const Payoff& J, const SaddlePoint& sp, const SaddleConfig& cfg,
                         std::size_t n_samples, std::uint64_t seed);

/// Certified runs use only analytic or conservative constants; heuristic runs
/// accept sampled lower bounds and are labelled as such.
enum class RunMode { certified, heuristic };

const char* to_string(RunMode m) noexcept;

/// Sampling and probing settings shared by the application solvers.
struct SolveOptions {
  std::size_t check_samples = 10000;
  std::uint64_t seed = 0;
  std::size_t uniqueness_starts = 16;
  /// Accept sampled constants (the result is then labelled heuristic).
  bool allow_heuristic = false;
};

/// Outcome of the multi-start probe and of the candidate-refutation argument.
struct Uniqueness {
  std::size_t starts = 0;
  double max_pairwise = 0.0;
  std::size_t candidates = 0;
  std::size_t refuted = 0;
};

/// One-sample check: passes when value <= threshold; the witness is `at`.
CheckReport scalar_check(std::string name, double value, double threshold, const Point& at);

/// Certified when every constant entering r_max is certified, heuristic
/// otherwise. Throws HypothesisViolation when the positivity hypothesis fails,
/// when r > r_max in certified mode (deficit r - r_max), or when a heuristic
/// run is not allowed; InvalidArgument when r is outside (0, rho].
RunMode resolve_run_mode(const ConstantsReport& report, double r, const SolveOptions& opts);

/// Structured test points of a set: P_T(0), +-R e_i for balls, corners for
/// boxes up to dimension 4.
std::vector<Point> structured_set_points(Eigen::Index n, const ConvexSet& T);

}  // namespace ballsaddle
