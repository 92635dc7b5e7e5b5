#pragma once

#include <ballsaddle/ballsaddle.hpp>

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string>
#include <vector>

namespace fixtures {

using ballsaddle::Matrix;
using ballsaddle::Point;

inline Point vec(std::initializer_list<double> v) {
  Point p(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) p(i++) = x;
  return p;
}

inline Matrix diag(std::initializer_list<double> v) { return vec(v).asDiagonal(); }

inline Matrix random_matrix(std::mt19937_64& rng, Eigen::Index n, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = g(rng);
  return m;
}

inline Point random_point(std::mt19937_64& rng, Eigen::Index n, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  Point p(n);
  for (Eigen::Index i = 0; i < n; ++i) p(i) = g(rng);
  return p;
}

inline Matrix random_symmetric(std::mt19937_64& rng, Eigen::Index n, double scale) {
  const Matrix m = random_matrix(rng, n, scale);
  return 0.5 * (m + m.transpose());
}

/// Psi(x) = (||x||^2, 0, ..., 0).
inline ballsaddle::SmoothMap norm_squared_map(Eigen::Index n, double rho) {
  std::vector<Matrix> Q(static_cast<std::size_t>(n), Matrix::Zero(n, n));
  Q[0] = Matrix::Identity(n, n);
  return ballsaddle::make_quadratic(Matrix::Zero(n, n), Point::Zero(n), Q, rho);
}

/// Quadratic map with small random curvature around an affine part.
inline ballsaddle::SmoothMap random_quadratic(std::uint64_t seed, Eigen::Index n, double rho,
                                              double curvature = 0.1) {
  std::mt19937_64 rng(seed);
  const Matrix A = random_matrix(rng, n, 0.5);
  const Point b = random_point(rng, n, 1.0);
  std::vector<Matrix> Q;
  for (Eigen::Index i = 0; i < n; ++i) Q.push_back(random_symmetric(rng, n, curvature));
  return ballsaddle::make_quadratic(A, b, Q, rho);
}

struct NamedMap {
  std::string name;
  ballsaddle::SmoothMap map;
};

/// Maps with declared constants covering every catalog family.
inline std::vector<NamedMap> catalog_maps() {
  std::vector<NamedMap> out;
  out.push_back({"constant_2d", ballsaddle::make_constant(vec({1, 0}), 1.0)});
  out.push_back({"constant_5d", ballsaddle::make_constant(vec({0.3, -1, 0.2, 0, 2}), 0.8)});
  out.push_back({"shifted_identity", ballsaddle::make_affine(Matrix::Identity(2, 2), vec({2, 0}), 1.0)});
  out.push_back({"affine_diag", ballsaddle::make_affine(diag({2, 1}), vec({1, -1}), 1.0)});
  std::mt19937_64 rng(5);
  out.push_back({"affine_random_3d",
                 ballsaddle::make_affine(random_matrix(rng, 3, 0.4), random_point(rng, 3, 1.0), 0.7)});
  out.push_back({"quadratic_1d", ballsaddle::make_quadratic(Matrix::Zero(1, 1), vec({0.5}),
                                                            {Matrix::Identity(1, 1)}, 1.0)});
  out.push_back({"norm_squared", norm_squared_map(2, 1.0)});
  out.push_back({"quadratic_random_2d", random_quadratic(21, 2, 1.0)});
  out.push_back({"quadratic_random_3d", random_quadratic(22, 3, 0.8)});
  out.push_back({"quadratic_random_6d", random_quadratic(23, 6, 0.5, 0.05)});
  return out;
}

}  // namespace fixtures
