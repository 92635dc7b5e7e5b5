#include "ballsaddle/hilbert.hpp"

#include "ballsaddle/errors.hpp"

#include <cmath>
#include <string>

namespace ballsaddle {

void require_finite(const Point& p, const char* what) {
  if (p.size() == 0) throw InvalidArgument(std::string(what) + " has dimension 0");
  if (!p.allFinite()) throw InvalidArgument(std::string(what) + " has a non-finite coordinate");
}

void require_same_dimension(const Point& a, const Point& b) {
  if (a.size() != b.size()) {
    throw DimensionError("dimension mismatch: " + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()));
  }
}

double inner(const Point& a, const Point& b) {
  require_same_dimension(a, b);
  require_finite(a);
  require_finite(b);
  return a.dot(b);
}

double norm(const Point& a) {
  require_finite(a);
  return a.norm();
}

Point project_ball(const Point& z, double r) {
  if (!(r > 0.0)) throw InvalidArgument("ball radius must be positive");
  const double n = z.norm();
  if (n <= r) return z;
  return (r / n) * z;
}

double dist_ball(const Point& p, double r) {
  if (!(r > 0.0)) throw InvalidArgument("ball radius must be positive");
  return std::max(0.0, p.norm() - r);
}

ConvexSet ConvexSet::ball(double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw InvalidArgument("ball radius must be positive and finite");
  }
  return ConvexSet(BallSet{radius});
}

ConvexSet ConvexSet::box(Point lower, Point upper) {
  require_same_dimension(lower, upper);
  require_finite(lower, "box lower corner");
  require_finite(upper, "box upper corner");
  if ((lower.array() > upper.array()).any()) {
    throw InvalidArgument("box requires lower <= upper componentwise");
  }
  return ConvexSet(BoxSet{std::move(lower), std::move(upper)});
}

ConvexSet ConvexSet::oracle(std::function<Point(const Point&)> project,
                            std::optional<double> bound) {
  if (!project) throw InvalidArgument("oracle set needs a projection function");
  if (bound && !(*bound > 0.0)) throw InvalidArgument("oracle bound must be positive");
  return ConvexSet(OracleSet{std::move(project), bound});
}

std::optional<Eigen::Index> ConvexSet::dimension() const {
  if (const auto* b = std::get_if<BoxSet>(&v_)) return b->lower.size();
  return std::nullopt;
}

bool ConvexSet::bounded() const noexcept {
  if (const auto* o = std::get_if<OracleSet>(&v_)) return o->bound.has_value();
  return true;
}

double ConvexSet::sup_norm() const {
  return std::visit(
      [](const auto& s) -> double {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, BallSet>) {
          return s.radius;
        } else if constexpr (std::is_same_v<S, BoxSet>) {
          // farthest corner: each coordinate at the endpoint of larger magnitude
          return s.lower.cwiseAbs().cwiseMax(s.upper.cwiseAbs()).norm();
        } else {
          if (!s.bound) throw InvalidArgument("oracle set has no declared bound");
          return *s.bound;
        }
      },
      v_);
}

double ConvexSet::diameter() const {
  if (const auto* b = std::get_if<BoxSet>(&v_)) return (b->upper - b->lower).norm();
  return 2.0 * sup_norm();
}

bool ConvexSet::contains(const Point& z, double tol) const {
  return (project_set(z, *this) - z).norm() <= tol;
}

Point project_set(const Point& z, const ConvexSet& c) {
  return std::visit(
      [&z](const auto& s) -> Point {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, BallSet>) {
          return project_ball(z, s.radius);
        } else if constexpr (std::is_same_v<S, BoxSet>) {
          require_same_dimension(z, s.lower);
          return z.cwiseMax(s.lower).cwiseMin(s.upper);
        } else {
          Point p = s.project(z);
          require_same_dimension(z, p);
          Point pp = s.project(p);
          if ((pp - p).norm() > kTolerance) {
            throw CertificationError("projection oracle is not idempotent");
          }
          return p;
        }
      },
      c.variant());
}

}  // namespace ballsaddle
