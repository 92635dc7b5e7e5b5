#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <variant>

namespace ballsaddle {

/// A point of the ambient space R^n with the Euclidean inner product.
using Point = Eigen::VectorXd;
/// Dense n x n matrix; used for Jacobians.
using Matrix = Eigen::MatrixXd;

/// Absolute tolerance used for comparisons unless an operation says otherwise.
inline constexpr double kTolerance = 1e-10;

/// Throws InvalidArgument unless every coordinate is finite.
void require_finite(const Point& p, const char* what = "point");
/// Throws DimensionError unless the two points have equal dimension.
void require_same_dimension(const Point& a, const Point& b);

double inner(const Point& a, const Point& b);
double norm(const Point& a);

/// Nearest point of the closed ball B_r: z if ||z|| <= r, else r z / ||z||.
Point project_ball(const Point& z, double r);
/// max(0, ||p|| - r).
double dist_ball(const Point& p, double r);

struct BallSet {
  double radius;
};

struct BoxSet {
  Point lower;
  Point upper;
};

/// General closed convex set known only through its metric projection.
/// `bound` is a radius R with C inside B_R; it is required wherever a bounded
/// set is needed (sampling, sup-norms, Lipschitz constants).
struct OracleSet {
  std::function<Point(const Point&)> project;
  std::optional<double> bound;
};

/// Closed convex set: a ball centred at the origin, a box, or a projection oracle.
class ConvexSet {
 public:
  using Variant = std::variant<BallSet, BoxSet, OracleSet>;

  static ConvexSet ball(double radius);
  static ConvexSet box(Point lower, Point upper);
  static ConvexSet oracle(std::function<Point(const Point&)> project,
                          std::optional<double> bound = std::nullopt);

  const Variant& variant() const noexcept { return v_; }
  bool is_ball() const noexcept { return std::holds_alternative<BallSet>(v_); }
  bool is_box() const noexcept { return std::holds_alternative<BoxSet>(v_); }
  bool is_oracle() const noexcept { return std::holds_alternative<OracleSet>(v_); }

  /// Ambient dimension for boxes; std::nullopt for the dimension-free variants.
  std::optional<Eigen::Index> dimension() const;

  /// sup_{y in C} ||y||. Exact for balls and boxes; the declared bound for oracles.
  /// Throws InvalidArgument for an oracle without a declared bound.
  double sup_norm() const;
  bool bounded() const noexcept;

  /// Euclidean diameter (2 sup_norm for oracles, which is an upper bound).
  double diameter() const;

  bool contains(const Point& z, double tol = kTolerance) const;

 private:
  explicit ConvexSet(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

/// Metric projection onto C. Oracle results are audited for idempotence and a
/// CertificationError is raised when P(P(z)) differs from P(z) by more than 1e-10.
Point project_set(const Point& z, const ConvexSet& c);

}  // namespace ballsaddle
