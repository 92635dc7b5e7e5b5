#include "ballsaddle/sampling.hpp"

#include "ballsaddle/errors.hpp"

#include <array>
#include <cmath>

namespace ballsaddle {
namespace {

std::vector<unsigned> first_primes(std::size_t count) {
  std::vector<unsigned> primes;
  for (unsigned c = 2; primes.size() < count; ++c) {
    bool prime = true;
    for (unsigned p : primes) {
      if (p * p > c) break;
      if (c % p == 0) {
        prime = false;
        break;
      }
    }
    if (prime) primes.push_back(c);
  }
  return primes;
}

}  // namespace

double radical_inverse(std::uint64_t index, unsigned base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= base;
  }
  return result;
}

std::vector<Point> structured_points(Eigen::Index n, double r) {
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(2 * n + 1));
  pts.push_back(Point::Zero(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    Point e = Point::Zero(n);
    e(i) = r;
    pts.push_back(e);
    pts.push_back(-e);
  }
  return pts;
}

std::vector<Point> halton_ball_points(Eigen::Index n, double r, std::size_t count) {
  const auto primes = first_primes(static_cast<std::size_t>(n));
  std::vector<Point> pts;
  pts.reserve(count);
  // index 0 of the Halton sequence is the origin; start at 1
  for (std::size_t k = 1; k <= count; ++k) {
    Point c(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      c(i) = 2.0 * radical_inverse(k, primes[static_cast<std::size_t>(i)]) - 1.0;
    }
    const double l2 = c.norm();
    if (l2 > 0.0) c *= c.cwiseAbs().maxCoeff() / l2;
    pts.push_back(r * c);
  }
  return pts;
}

Point uniform_in_ball(Rng& rng, Eigen::Index n, double r) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Point d(n);
  double len = 0.0;
  do {
    for (Eigen::Index i = 0; i < n; ++i) d(i) = gauss(rng);
    len = d.norm();
  } while (len == 0.0);
  const double radius = r * std::pow(unif(rng), 1.0 / static_cast<double>(n));
  return (radius / len) * d;
}

Point sample_in_set(Rng& rng, Eigen::Index n, const ConvexSet& c) {
  if (const auto* b = std::get_if<BallSet>(&c.variant())) return uniform_in_ball(rng, n, b->radius);
  if (const auto* b = std::get_if<BoxSet>(&c.variant())) {
    if (b->lower.size() != n) throw DimensionError("box dimension does not match sample dimension");
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Point p(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      p(i) = b->lower(i) + unif(rng) * (b->upper(i) - b->lower(i));
    }
    return p;
  }
  return project_set(uniform_in_ball(rng, n, c.sup_norm()), c);
}

std::vector<Point> sphere_probes(const Point& x, double r) {
  static constexpr std::array<double, 8> kAngles = {1e-3, 3e-3, 1e-2, 3e-2, 0.1, 0.3, 1.0, 2.0};
  const Eigen::Index n = x.size();
  std::vector<Point> probes;
  const double len = x.norm();
  if (len == 0.0) return probes;
  const Point u = x / len;
  probes.push_back(-r * u);
  for (Eigen::Index i = 0; i < n; ++i) {
    Point t = Point::Unit(n, i) - u(i) * u;
    const double tl = t.norm();
    if (tl < 1e-8) continue;
    t /= tl;
    for (double a : kAngles) {
      probes.push_back(r * (std::cos(a) * u + std::sin(a) * t));
      probes.push_back(r * (std::cos(a) * u - std::sin(a) * t));
    }
  }
  return probes;
}

}  // namespace ballsaddle
