#pragma once

#include "ballsaddle/hilbert.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace ballsaddle {

using Rng = std::mt19937_64;

/// Radical-inverse of `index` in the given prime base.
double radical_inverse(std::uint64_t index, unsigned base);

/// The 2n+1 structured points {0, +r e_i, -r e_i}.
std::vector<Point> structured_points(Eigen::Index n, double r);

/// `count` Halton points of B_r. The cube [-1,1]^n is mapped onto the unit ball
/// radially (x -> x ||x||_inf / ||x||_2), which keeps the construction
/// deterministic in any dimension. Points are deterministic in (n, r, count).
std::vector<Point> halton_ball_points(Eigen::Index n, double r, std::size_t count);

/// Uniform sample from B_r.
Point uniform_in_ball(Rng& rng, Eigen::Index n, double r);

/// Uniform sample from a ball or box; oracle sets return the projection of a
/// uniform point of their bounding ball (not uniform, but inside the set).
Point sample_in_set(Rng& rng, Eigen::Index n, const ConvexSet& c);

/// Points of S_r near a point `x` of S_r: rotations of x towards each
/// coordinate direction by a ladder of angles, both signs, plus the antipode.
std::vector<Point> sphere_probes(const Point& x, double r);

}  // namespace ballsaddle
