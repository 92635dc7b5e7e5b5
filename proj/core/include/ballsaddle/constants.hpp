#pragma once

#include "ballsaddle/catalog.hpp"
#include "ballsaddle/hilbert.hpp"

#include <cstdint>
#include <functional>
#include <optional>

namespace ballsaddle {

/// Which radius bound applies:
///   saddle -> min{rho, delta / (2L)}
///   vi     -> min{rho, sigma / (2M)}
///   ba     -> min{rho, sigma / L}
enum class TheoremMode { saddle, vi, ba };

const char* to_string(TheoremMode m) noexcept;

/// Constants of one problem instance, each tagged with how it was obtained.
struct ConstantsReport {
  TheoremMode mode = TheoremMode::vi;
  double rho = 0.0;
  std::optional<Constant> theta;
  std::optional<Constant> gamma;
  std::optional<Constant> eta;
  std::optional<Constant> delta;
  std::optional<Constant> M;
  std::optional<Constant> L;
  std::optional<Constant> sigma;
  /// Admissible radius; 0 when the positivity hypothesis on sigma/delta fails.
  double r_max = 0.0;
  bool hypotheses_hold = false;

  /// True when no constant entering r_max is a sampled lower bound.
  bool certified() const noexcept;
};

struct EstimationOptions {
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
  /// When false, declared constants are ignored and everything is sampled.
  bool use_analytic = true;
};

/// Spectral norm by power iteration on A^T A (relative tolerance 1e-10 on the
/// Rayleigh quotient, at most 10^4 iterations). When the top eigenvalues are
/// nearly tied, the iteration restarts from a vector filtered through a high
/// power of A^T A. Throws NonConvergence.
double op_norm(const Matrix& A);

/// sup_{x in B_rho} ||F'(x)||: declared value when available, otherwise the max
/// over {0, +-rho e_i} and `samples` Halton points (a lower bound).
Constant estimate_theta(const SmoothMap& map, const EstimationOptions& opts = {});

/// max ||G(a) - G(b)|| / ||a - b|| over `pairs` random pairs in B_rho, preceded
/// by the structured pairs (0, +-rho e_i). Always a sampled lower bound.
Constant estimate_lipschitz(const std::function<Point(const Point&)>& G, Eigen::Index n,
                            double rho, std::size_t pairs, std::uint64_t seed);
/// Matrix-valued oracle; differences are measured in operator norm.
Constant estimate_lipschitz(const std::function<Matrix(const Point&)>& G, Eigen::Index n,
                            double rho, std::size_t pairs, std::uint64_t seed);

/// gamma: declared, or the sampled Lipschitz constant of the Jacobian.
Constant estimate_gamma(const SmoothMap& map, const EstimationOptions& opts = {});
/// eta: declared, or the sampled Lipschitz constant of x -> x - F(x).
Constant estimate_eta(const SmoothMap& map, const EstimationOptions& opts = {});

/// inf_{y in Y} ||offset + linear * y|| by projected gradient on the squared
/// norm (step 1/(2 ||linear||^2), stop when the gradient mapping is <= 1e-10,
/// at most 10^5 iterations). Throws NonConvergence.
double min_affine_norm(const Point& offset, const Matrix& linear, const ConvexSet& Y);

/// inf_{||y|| <= rho} ||phi0 - jac0^T y||.
double sigma_vi(const Point& phi0, const Matrix& jac0, double rho);
/// inf_{y in Y} ||jac0^T y - f0||.
double sigma_ba(const Point& f0, const Matrix& jac0, const ConvexSet& Y);

/// inf_{y in Y} ||grad_x J(0, y)||. Exact minimisation when the payoff exposes
/// its origin gradient; otherwise a sampled minimum flagged `sampled`.
Constant delta_const(const Payoff& J, const ConvexSet& Y, const EstimationOptions& opts = {});

/// min{rho, numerator / denominator} for the mode; a zero denominator with a
/// positive numerator gives rho. Throws HypothesisViolation when the numerator
/// (sigma or delta) is <= 1e-10, InvalidArgument when a required constant is missing.
double admissible_radius(TheoremMode mode, const ConstantsReport& report, double rho);

/// theta, gamma, eta, M = 2(theta + rho gamma), sigma, delta = sigma, r_max.
ConstantsReport vi_report(const SmoothMap& phi, const EstimationOptions& opts = {});
/// theta, gamma, eta, L = 2(eta + theta + gamma(rho + sup_Y ||y||)), sigma, delta = 2 sigma, r_max.
ConstantsReport ba_report(const SmoothMap& f, const ConvexSet& Y,
                          const EstimationOptions& opts = {});
/// L (declared grad-Lipschitz constant, or sampled), delta, r_max.
ConstantsReport saddle_report(const Payoff& J, const EstimationOptions& opts = {});

}  // namespace ballsaddle
