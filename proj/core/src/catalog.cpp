#include "ballsaddle/catalog.hpp"

#include "ballsaddle/constants.hpp"
#include "ballsaddle/errors.hpp"
#include "ballsaddle/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ballsaddle {

const char* to_string(Certification c) noexcept {
  switch (c) {
    case Certification::analytic: return "analytic";
    case Certification::conservative: return "conservative-bound";
    case Certification::sampled: return "sampled-lower-bound";
  }
  return "unknown";
}

Certification weakest(Certification a, Certification b) noexcept {
  return static_cast<int>(a) >= static_cast<int>(b) ? a : b;
}

namespace {

void require_radius(double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw InvalidArgument("rho must be positive and finite");
}

void require_square(const Matrix& A, Eigen::Index n, const char* what) {
  if (A.rows() != n || A.cols() != n) {
    throw DimensionError(std::string(what) + " must be " + std::to_string(n) + "x" +
                         std::to_string(n));
  }
  if (!A.allFinite()) throw InvalidArgument(std::string(what) + " has a non-finite entry");
}

Point interior_sample(Rng& rng, Eigen::Index n, double rho) {
  return uniform_in_ball(rng, n, 0.9 * rho);
}

}  // namespace

SmoothMap make_map(Eigen::Index n, double rho, std::function<Point(const Point&)> value,
                   std::function<Matrix(const Point&)> jacobian,
                   std::optional<AnalyticConstants> analytic, std::string description) {
  if (n < 1) throw InvalidArgument("dimension must be >= 1");
  require_radius(rho);
  if (!value || !jacobian) throw InvalidArgument("map needs value and jacobian oracles");
  SmoothMap m;
  m.dimension = n;
  m.rho = rho;
  m.value = std::move(value);
  m.jacobian = std::move(jacobian);
  m.analytic = std::move(analytic);
  m.description = std::move(description);
  return m;
}

SmoothMap make_constant(const Point& c, double rho) {
  require_finite(c, "c");
  require_radius(rho);
  const Eigen::Index n = c.size();
  AnalyticConstants k{{0.0, Certification::analytic},
                      {0.0, Certification::analytic},
                      Constant{1.0, Certification::analytic}};
  return make_map(
      n, rho, [c](const Point&) -> Point { return c; },
      [n](const Point&) -> Matrix { return Matrix::Zero(n, n); }, k, "constant");
}

SmoothMap make_affine(const Matrix& A, const Point& b, double rho) {
  require_finite(b, "b");
  require_radius(rho);
  const Eigen::Index n = b.size();
  require_square(A, n, "A");
  const Matrix I = Matrix::Identity(n, n);
  AnalyticConstants k{{op_norm(A), Certification::analytic},
                      {0.0, Certification::analytic},
                      Constant{op_norm(I - A), Certification::analytic}};
  return make_map(
      n, rho, [A, b](const Point& x) -> Point { return A * x + b; },
      [A](const Point&) -> Matrix { return A; }, k, "affine");
}

SmoothMap make_quadratic(const Matrix& A, const Point& b, const std::vector<Matrix>& Q,
                         double rho) {
  require_finite(b, "b");
  require_radius(rho);
  const Eigen::Index n = b.size();
  require_square(A, n, "A");
  if (static_cast<Eigen::Index>(Q.size()) != n) {
    throw DimensionError("quadratic map needs one Q_i per output component");
  }
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < Q.size(); ++i) {
    require_square(Q[i], n, "Q_i");
    if ((Q[i] - Q[i].transpose()).cwiseAbs().maxCoeff() > kTolerance) {
      throw InvalidArgument("Q_" + std::to_string(i) + " is not symmetric");
    }
    const double q = op_norm(Q[i]);
    sum_sq += q * q;
  }
  const double s = std::sqrt(sum_sq);
  const double normA = op_norm(A);
  const double normIA = op_norm(Matrix::Identity(n, n) - A);
  const Certification bound = s > 0.0 ? Certification::conservative : Certification::analytic;
  auto constants_at = [s, normA, normIA, bound](double r) {
    return AnalyticConstants{{normA + 2.0 * r * s, bound},
                             {2.0 * s, bound},
                             Constant{normIA + 2.0 * r * s, bound}};
  };
  SmoothMap m = make_map(
      n, rho,
      [A, b, Q](const Point& x) -> Point {
        Point v = A * x + b;
        for (std::size_t i = 0; i < Q.size(); ++i) {
          v(static_cast<Eigen::Index>(i)) += x.dot(Q[i] * x);
        }
        return v;
      },
      [A, Q](const Point& x) -> Matrix {
        Matrix J = A;
        for (std::size_t i = 0; i < Q.size(); ++i) {
          J.row(static_cast<Eigen::Index>(i)) += 2.0 * (Q[i] * x).transpose();
        }
        return J;
      },
      constants_at(rho), "quadratic");
  m.analytic_at = constants_at;
  return m;
}

SmoothMap restricted(const SmoothMap& map, double r) {
  require_radius(r);
  if (r > map.rho * (1.0 + 1e-12)) throw InvalidArgument("restriction radius exceeds rho");
  SmoothMap m = map;
  m.rho = std::min(r, map.rho);
  if (map.analytic_at) m.analytic = map.analytic_at(m.rho);
  return m;
}

SmoothMap shifted(const SmoothMap& map, const Point& w) {
  if (w.size() != map.dimension) throw DimensionError("shift has the wrong dimension");
  require_finite(w, "w");
  SmoothMap m = map;
  auto inner_value = map.value;
  m.value = [inner_value, w](const Point& x) -> Point { return inner_value(x) - w; };
  m.description = map.description + " - w";
  return m;
}

double jacobian_fd_error(const SmoothMap& map, std::size_t samples, std::uint64_t seed) {
  Rng rng(seed);
  const Eigen::Index n = map.dimension;
  const double h = 1e-5 * map.rho;
  double worst = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const Point x = interior_sample(rng, n, map.rho);
    const Matrix J = map.jacobian(x);
    Matrix fd(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      Point xp = x, xm = x;
      xp(j) += h;
      xm(j) -= h;
      fd.col(j) = (map.value(xp) - map.value(xm)) / (2.0 * h);
    }
    worst = std::max(worst, (fd - J).norm() / std::max(1.0, J.norm()));
  }
  return worst;
}

void validate(const SmoothMap& map, std::size_t samples, std::uint64_t seed) {
  Rng rng(seed);
  for (std::size_t s = 0; s < samples; ++s) {
    const Point x = uniform_in_ball(rng, map.dimension, map.rho);
    const Point v = map.value(x);
    if (v.size() != map.dimension) throw DimensionError("map value has the wrong dimension");
    if (!v.allFinite()) throw InvalidArgument("map value is not finite on B_rho");
    const Matrix J = map.jacobian(x);
    if (J.rows() != map.dimension || J.cols() != map.dimension) {
      throw DimensionError("map jacobian has the wrong shape");
    }
    if (!J.allFinite()) throw InvalidArgument("map jacobian is not finite on B_rho");
  }
  const double err = jacobian_fd_error(map, samples, seed);
  if (err > 1e-5) {
    std::ostringstream os;
    os << "jacobian disagrees with finite differences (relative error " << err << ")";
    throw InvalidArgument(os.str());
  }
}

Payoff vi_payoff(const SmoothMap& phi, const Constant& M, double theta) {
  Payoff p = vi_payoff(phi);
  p.grad_lipschitz = M;
  p.coupling = theta;
  return p;
}

Payoff vi_payoff(const SmoothMap& phi) {
  Payoff p;
  p.dimension = phi.dimension;
  p.x_radius = phi.rho;
  p.y_set = ConvexSet::ball(phi.rho);
  p.kind = "vi";
  auto F = phi.value;
  auto DF = phi.jacobian;
  p.value = [F](const Point& x, const Point& y) { return F(x).dot(x - y); };
  p.grad_x = [F, DF](const Point& x, const Point& y) -> Point {
    return DF(x).transpose() * (x - y) + F(x);
  };
  p.grad_y = [F](const Point& x, const Point&) -> Point { return -F(x); };
  p.y_lipschitz = 0.0;
  if (phi.analytic) {
    const auto& k = *phi.analytic;
    p.grad_lipschitz = Constant{2.0 * (k.theta.value + phi.rho * k.gamma.value),
                                weakest(k.theta.how, k.gamma.how)};
    p.coupling = k.theta.value;
  }
  const Point zero = Point::Zero(phi.dimension);
  p.origin_gradient = OriginGradient{F(zero), -DF(zero).transpose()};
  return p;
}

Payoff ba_payoff(const SmoothMap& f, const ConvexSet& y_set, const Constant& L, double theta) {
  Payoff p = ba_payoff(f, y_set);
  p.grad_lipschitz = L;
  p.coupling = 2.0 * theta;
  return p;
}

Payoff ba_payoff(const SmoothMap& f, const ConvexSet& y_set) {
  if (!y_set.bounded()) throw InvalidArgument("Y must be bounded (declare an oracle bound)");
  if (auto d = y_set.dimension(); d && *d != f.dimension) {
    throw DimensionError("Y has the wrong dimension");
  }
  Payoff p;
  p.dimension = f.dimension;
  p.x_radius = f.rho;
  p.y_set = y_set;
  p.kind = "ba";
  auto F = f.value;
  auto DF = f.jacobian;
  p.value = [F](const Point& x, const Point& y) {
    const Point fx = F(x);
    return (fx - x).squaredNorm() - (fx - y).squaredNorm();
  };
  p.grad_x = [F, DF](const Point& x, const Point& y) -> Point {
    return 2.0 * (x - F(x)) - 2.0 * (DF(x).transpose() * (x - y));
  };
  p.grad_y = [F](const Point& x, const Point& y) -> Point { return 2.0 * (F(x) - y); };
  p.y_lipschitz = 2.0;
  if (f.analytic && f.analytic->eta) {
    const auto& k = *f.analytic;
    const double L = 2.0 * (k.eta->value + k.theta.value +
                            k.gamma.value * (f.rho + y_set.sup_norm()));
    p.grad_lipschitz = Constant{L, weakest(weakest(k.theta.how, k.gamma.how), k.eta->how)};
    p.coupling = 2.0 * k.theta.value;
  }
  const Point zero = Point::Zero(f.dimension);
  p.origin_gradient = OriginGradient{-2.0 * F(zero), 2.0 * DF(zero).transpose()};
  return p;
}

Payoff linear_payoff(const Point& c, double rho, const ConvexSet& y_set) {
  require_finite(c, "c");
  require_radius(rho);
  Payoff p;
  p.dimension = c.size();
  p.x_radius = rho;
  p.y_set = y_set;
  p.kind = "linear";
  p.value = [c](const Point& x, const Point&) { return c.dot(x); };
  p.grad_x = [c](const Point&, const Point&) -> Point { return c; };
  p.grad_y = [](const Point&, const Point& y) -> Point { return Point::Zero(y.size()); };
  p.grad_lipschitz = Constant{0.0, Certification::analytic};
  p.coupling = 0.0;
  p.y_lipschitz = 0.0;
  const Eigen::Index n = c.size();
  p.origin_gradient = OriginGradient{c, Matrix::Zero(n, n)};
  return p;
}

Payoff bilinear_payoff(const Matrix& B, const Point& c, double rho, const ConvexSet& y_set) {
  require_finite(c, "c");
  require_radius(rho);
  const Eigen::Index n = c.size();
  require_square(B, n, "B");
  Payoff p;
  p.dimension = n;
  p.x_radius = rho;
  p.y_set = y_set;
  p.kind = "bilinear";
  p.value = [B, c](const Point& x, const Point& y) { return x.dot(B * y) + c.dot(x); };
  p.grad_x = [B, c](const Point&, const Point& y) -> Point { return B * y + c; };
  p.grad_y = [B](const Point& x, const Point&) -> Point { return B.transpose() * x; };
  p.grad_lipschitz = Constant{0.0, Certification::analytic};
  p.coupling = op_norm(B);
  p.y_lipschitz = 0.0;
  p.origin_gradient = OriginGradient{c, B};
  return p;
}

GradientAudit gradient_fd_error(const Payoff& J, std::size_t pairs, std::uint64_t seed) {
  Rng rng(seed);
  const Eigen::Index n = J.dimension;
  const double hx = 1e-5 * J.x_radius;
  const double hy = 1e-5 * std::max(J.y_set.diameter(), 1e-12);
  GradientAudit audit;
  for (std::size_t s = 0; s < pairs; ++s) {
    const Point x = interior_sample(rng, n, J.x_radius);
    const Point y = sample_in_set(rng, n, J.y_set);
    const Point gx = J.grad_x(x, y);
    Point fdx(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      Point xp = x, xm = x;
      xp(j) += hx;
      xm(j) -= hx;
      fdx(j) = (J.value(xp, y) - J.value(xm, y)) / (2.0 * hx);
    }
    audit.grad_x_error =
        std::max(audit.grad_x_error, (fdx - gx).norm() / std::max(1.0, gx.norm()));
    if (J.grad_y) {
      const Point gy = J.grad_y(x, y);
      Point fdy(n);
      for (Eigen::Index j = 0; j < n; ++j) {
        Point yp = y, ym = y;
        yp(j) += hy;
        ym(j) -= hy;
        fdy(j) = (J.value(x, yp) - J.value(x, ym)) / (2.0 * hy);
      }
      audit.grad_y_error =
          std::max(audit.grad_y_error, (fdy - gy).norm() / std::max(1.0, gy.norm()));
    }
  }
  return audit;
}

double midpoint_concavity_slack(const Payoff& J, std::size_t triples, std::uint64_t seed) {
  Rng rng(seed);
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < triples; ++s) {
    const Point x = uniform_in_ball(rng, J.dimension, J.x_radius);
    const Point y1 = sample_in_set(rng, J.dimension, J.y_set);
    const Point y2 = sample_in_set(rng, J.dimension, J.y_set);
    const double mid = J.value(x, 0.5 * (y1 + y2));
    worst = std::min(worst, mid - 0.5 * (J.value(x, y1) + J.value(x, y2)));
  }
  return worst;
}

}  // namespace ballsaddle
