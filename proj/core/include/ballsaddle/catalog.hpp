#pragma once

#include "ballsaddle/hilbert.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ballsaddle {

/// How much a constant can be trusted. Ordered from strongest to weakest.
enum class Certification {
  analytic,      ///< exact closed form
  conservative,  ///< certified upper bound, possibly loose
  sampled,       ///< sampled lower bound; not usable for certification
};

const char* to_string(Certification c) noexcept;
/// The weaker of two certification levels.
Certification weakest(Certification a, Certification b) noexcept;

struct Constant {
  double value = 0.0;
  Certification how = Certification::analytic;

  bool certified() const noexcept { return how != Certification::sampled; }
};

/// Declared constants of a C^{1,1} map on B_rho:
///   theta = sup ||F'(x)||, gamma = Lipschitz constant of F',
///   eta   = Lipschitz constant of x -> x - F(x).
struct AnalyticConstants {
  Constant theta;
  Constant gamma;
  std::optional<Constant> eta;
};

/// A C^{1,1} map on B_rho given by value and Jacobian oracles. Oracles are
/// defined on all of R^n but only queried on B_rho, and must be safe to call
/// concurrently.
struct SmoothMap {
  Eigen::Index dimension = 0;
  double rho = 0.0;
  std::function<Point(const Point&)> value;
  std::function<Matrix(const Point&)> jacobian;
  std::optional<AnalyticConstants> analytic;
  /// Recomputes the analytic constants for a smaller domain radius; empty when
  /// the constants do not depend on the radius (or are user-declared).
  std::function<AnalyticConstants(double)> analytic_at;
  std::string description;
};

/// Map from user oracles; `analytic` is optional and trusted as declared.
SmoothMap make_map(Eigen::Index n, double rho, std::function<Point(const Point&)> value,
                   std::function<Matrix(const Point&)> jacobian,
                   std::optional<AnalyticConstants> analytic = std::nullopt,
                   std::string description = "oracle");

/// F(x) = c.
SmoothMap make_constant(const Point& c, double rho);
/// F(x) = A x + b; theta = ||A||, gamma = 0, eta = ||I - A||.
SmoothMap make_affine(const Matrix& A, const Point& b, double rho);
/// F_i(x) = (A x + b)_i + x^T Q_i x with symmetric Q_i.
/// gamma and theta are the certified bounds 2 s and ||A|| + 2 rho s with
/// s = (sum_i ||Q_i||^2)^{1/2}; eta is bounded by ||I - A|| + 2 rho s.
SmoothMap make_quadratic(const Matrix& A, const Point& b, const std::vector<Matrix>& Q,
                         double rho);

/// The same map viewed on B_r, r <= rho. Radius-dependent constants are recomputed.
SmoothMap restricted(const SmoothMap& map, double r);
/// x -> F(x) - w. Jacobian and constants are unchanged.
SmoothMap shifted(const SmoothMap& map, const Point& w);

/// Evaluates value and jacobian on `samples` random points of B_rho and checks
/// that both are finite and that the jacobian matches central differences
/// (step 1e-5 rho) to relative error <= 1e-5. Throws InvalidArgument otherwise.
void validate(const SmoothMap& map, std::size_t samples = 100, std::uint64_t seed = 0);

/// Largest relative error between the jacobian and central differences of the
/// value over `samples` random interior points.
double jacobian_fd_error(const SmoothMap& map, std::size_t samples, std::uint64_t seed);

/// grad_x J(0, y) = offset + linear * y; available when it is affine in y.
struct OriginGradient {
  Point offset;
  Matrix linear;
};

/// A payoff J(x, y) on B_rho x Y with its x-gradient, and optionally its
/// y-gradient. Built by the variational-inequality and best-approximation
/// constructions, or directly for bilinear test problems.
struct Payoff {
  Eigen::Index dimension = 0;
  double x_radius = 0.0;
  ConvexSet y_set = ConvexSet::ball(1.0);
  std::function<double(const Point&, const Point&)> value;
  std::function<Point(const Point&, const Point&)> grad_x;
  std::function<Point(const Point&, const Point&)> grad_y;  // may be empty
  /// Lipschitz constant of x -> grad_x J(x, y), uniform in y.
  std::optional<Constant> grad_lipschitz;
  /// Bound on how fast grad_x moves with y and grad_y moves with x.
  std::optional<double> coupling;
  /// Lipschitz constant of y -> grad_y J(x, y).
  std::optional<double> y_lipschitz;
  std::optional<OriginGradient> origin_gradient;
  std::string kind;
};

/// J(x, y) = <F(x), x - y> with Y = B_rho. grad_lipschitz = M = 2(theta + rho gamma)
/// when the map declares constants.
Payoff vi_payoff(const SmoothMap& phi);
/// Same payoff with M and theta supplied by the caller (e.g. from a constants report).
Payoff vi_payoff(const SmoothMap& phi, const Constant& M, double theta);

/// J(x, y) = ||f(x) - x||^2 - ||f(x) - y||^2 on B_rho x Y, Y bounded.
/// grad_lipschitz = L = 2(eta + theta + gamma (rho + sup_Y ||y||)) when declared.
Payoff ba_payoff(const SmoothMap& f, const ConvexSet& y_set);
Payoff ba_payoff(const SmoothMap& f, const ConvexSet& y_set, const Constant& L, double theta);

/// J(x, y) = <c, x>; independent of y.
Payoff linear_payoff(const Point& c, double rho, const ConvexSet& y_set);
/// J(x, y) = <x, B y> + <c, x>.
Payoff bilinear_payoff(const Matrix& B, const Point& c, double rho, const ConvexSet& y_set);

/// Largest relative error of grad_x (and grad_y when present) against central
/// differences of the value, over `pairs` random (x, y) in B_rho x Y.
struct GradientAudit {
  double grad_x_error = 0.0;
  double grad_y_error = 0.0;
};
GradientAudit gradient_fd_error(const Payoff& J, std::size_t pairs, std::uint64_t seed);

/// Smallest value of J(x, (y1+y2)/2) - (J(x,y1) + J(x,y2))/2 over random triples;
/// non-negative (up to rounding) for a payoff concave in y.
double midpoint_concavity_slack(const Payoff& J, std::size_t triples, std::uint64_t seed);

}  // namespace ballsaddle
