#pragma once

#include "ballsaddle/catalog.hpp"
#include "ballsaddle/hilbert.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace ballsaddle {

/// Axis-aligned grid over a set's bounding box, keeping the points of the set.
/// Grids are limited to dimension <= 3 and 10^7 points.
struct GridSpec {
  std::size_t points_per_axis = 201;
};

/// Grid points of B_r (or of a ball/box/oracle set), in lexicographic order.
std::vector<Point> grid_points(Eigen::Index n, const ConvexSet& set, const GridSpec& g);
/// Spacing of the grid over B_r: 2r / (points_per_axis - 1).
double grid_spacing(double r, const GridSpec& g);

struct GridSaddle {
  Point x_hat;
  Point y_hat;
  double value = 0.0;
};

/// Exhaustive argmin_x max_y phi(x, y) with phi = (L/2)||x||^2 + J over grids
/// of B_r and T; ties go to the smallest grid index.
GridSaddle grid_saddle_oracle(const Payoff& J, double L, double r, const ConvexSet& T,
                              const GridSpec& g);

/// max over grid x != candidate of max{<F(c), c - x>, <F(x), c - x>}.
/// Negative exactly when the candidate satisfies the two-sided variational
/// inequality on the grid.
double vi_violation_score(const SmoothMap& phi, const Point& candidate, double r,
                          const GridSpec& g);

struct GridVI {
  Point x_hat;
  double score = 0.0;
};

/// Best candidate on S_r: grid points within one spacing of the sphere,
/// normalised onto it, ranked by vi_violation_score.
GridVI grid_vi_oracle(const SmoothMap& phi, double r, const GridSpec& g);

/// Projected fixed-point iteration x <- P_{B_r}(x - tau F(x)) from 0 until
/// successive iterates differ by <= tol. Throws NonConvergence after 10^6 steps.
Point fixedpoint_vi_oracle(const SmoothMap& phi, double r, double tau, double tol);

/// inf_{y in Y} ||offset + linear y|| by exhaustive grid search followed by
/// repeated zoomed grids around the incumbent (dimension <= 3).
double grid_min_affine_norm(const Point& offset, const Matrix& linear, const ConvexSet& Y,
                            const GridSpec& g);

/// Runs `solver` once per seed and returns the largest pairwise distance
/// between the returned points. Requires at least two seeds.
double uniqueness_probe(const std::function<Point(std::uint64_t)>& solver,
                        std::span<const std::uint64_t> seeds);
/// Seeds derived deterministically from `seed`.
double uniqueness_probe(const std::function<Point(std::uint64_t)>& solver, std::size_t starts,
                        std::uint64_t seed);

/// The `starts` seeds used by the seed-stream overload.
std::vector<std::uint64_t> derive_seeds(std::size_t starts, std::uint64_t seed);

}  // namespace ballsaddle
