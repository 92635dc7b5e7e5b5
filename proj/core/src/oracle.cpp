#include "ballsaddle/oracle.hpp"

#include "ballsaddle/errors.hpp"
#include "ballsaddle/parallel.hpp"

#include <cmath>
#include <limits>

namespace ballsaddle {
namespace {

constexpr std::size_t kMaxGrid = 10'000'000;

void require_grid(Eigen::Index n, const GridSpec& g) {
  if (n < 1 || n > 3) throw InvalidArgument("grid oracles support dimension 1..3 only");
  if (g.points_per_axis < 2) throw InvalidArgument("grid needs at least 2 points per axis");
  const double total = std::pow(static_cast<double>(g.points_per_axis), static_cast<double>(n));
  if (total > static_cast<double>(kMaxGrid)) throw InvalidArgument("grid too large");
}

/// Lexicographic grid over the box [lo, hi], filtered by `keep`.
template <class Keep>
std::vector<Point> box_grid(const Point& lo, const Point& hi, std::size_t per_axis, Keep keep) {
  const Eigen::Index n = lo.size();
  std::size_t total = 1;
  for (Eigen::Index i = 0; i < n; ++i) total *= per_axis;
  std::vector<Point> pts;
  Point p(n);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    for (Eigen::Index i = n - 1; i >= 0; --i) {
      const std::size_t k = rem % per_axis;
      rem /= per_axis;
      const double t = static_cast<double>(k) / static_cast<double>(per_axis - 1);
      p(i) = lo(i) + t * (hi(i) - lo(i));
    }
    if (keep(p)) pts.push_back(p);
  }
  return pts;
}

}  // namespace

double grid_spacing(double r, const GridSpec& g) {
  return 2.0 * r / static_cast<double>(g.points_per_axis - 1);
}

std::vector<Point> grid_points(Eigen::Index n, const ConvexSet& set, const GridSpec& g) {
  require_grid(n, g);
  if (const auto* b = std::get_if<BallSet>(&set.variant())) {
    const double r = b->radius;
    return box_grid(Point::Constant(n, -r), Point::Constant(n, r), g.points_per_axis,
                    [r](const Point& p) { return p.norm() <= r * (1.0 + 1e-12); });
  }
  if (const auto* b = std::get_if<BoxSet>(&set.variant())) {
    if (b->lower.size() != n) throw DimensionError("grid: box dimension mismatch");
    return box_grid(b->lower, b->upper, g.points_per_axis, [](const Point&) { return true; });
  }
  const double R = set.sup_norm();
  return box_grid(Point::Constant(n, -R), Point::Constant(n, R), g.points_per_axis,
                  [&set](const Point& p) { return set.contains(p, 1e-12); });
}

GridSaddle grid_saddle_oracle(const Payoff& J, double L, double r, const ConvexSet& T,
                              const GridSpec& g) {
  const Eigen::Index n = J.dimension;
  const auto xs = grid_points(n, ConvexSet::ball(r), g);
  const auto ys = grid_points(n, T, g);
  if (xs.empty() || ys.empty()) throw InvalidArgument("grid oracle: empty grid");
  std::vector<double> inner_max(xs.size());
  std::vector<std::size_t> inner_arg(xs.size());
  parallel_for(xs.size(), [&](std::size_t i) {
    const double reg = 0.5 * L * xs[i].squaredNorm();
    double best = -std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t j = 0; j < ys.size(); ++j) {
      const double v = reg + J.value(xs[i], ys[j]);
      if (v > best) {
        best = v;
        arg = j;
      }
    }
    inner_max[i] = best;
    inner_arg[i] = arg;
  });
  std::size_t bi = 0;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (inner_max[i] < inner_max[bi]) bi = i;
  }
  return GridSaddle{xs[bi], ys[inner_arg[bi]], inner_max[bi]};
}

namespace {

double score_against(const Point& c, const Point& fc, const std::vector<Point>& grid,
                     const std::vector<Point>& fgrid) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Point d = c - grid[k];
    if (d.norm() <= 1e-12) continue;
    worst = std::max(worst, std::max(fc.dot(d), fgrid[k].dot(d)));
  }
  return worst;
}

}  // namespace

double vi_violation_score(const SmoothMap& phi, const Point& candidate, double r,
                          const GridSpec& g) {
  const auto grid = grid_points(phi.dimension, ConvexSet::ball(r), g);
  std::vector<Point> fgrid(grid.size());
  parallel_for(grid.size(), [&](std::size_t k) { fgrid[k] = phi.value(grid[k]); });
  return score_against(candidate, phi.value(candidate), grid, fgrid);
}

GridVI grid_vi_oracle(const SmoothMap& phi, double r, const GridSpec& g) {
  const auto grid = grid_points(phi.dimension, ConvexSet::ball(r), g);
  const double h = grid_spacing(r, g);
  std::vector<Point> fgrid(grid.size());
  parallel_for(grid.size(), [&](std::size_t k) { fgrid[k] = phi.value(grid[k]); });
  std::vector<Point> cands;
  for (const auto& p : grid) {
    const double pn = p.norm();
    if (pn > 0.0 && r - pn <= h) cands.push_back((r / pn) * p);
  }
  if (cands.empty()) throw InvalidArgument("grid_vi_oracle: no boundary candidates");
  std::vector<double> score(cands.size());
  parallel_for(cands.size(), [&](std::size_t i) {
    score[i] = score_against(cands[i], phi.value(cands[i]), grid, fgrid);
  });
  std::size_t best = 0;
  for (std::size_t i = 1; i < cands.size(); ++i) {
    if (score[i] < score[best]) best = i;
  }
  return GridVI{cands[best], score[best]};
}

Point fixedpoint_vi_oracle(const SmoothMap& phi, double r, double tau, double tol) {
  if (!(tau > 0.0) || !(tol > 0.0)) throw InvalidArgument("fixedpoint_vi_oracle: tau and tol must be positive");
  Point x = Point::Zero(phi.dimension);
  constexpr std::size_t kMaxIters = 1'000'000;
  double step = 0.0;
  for (std::size_t it = 0; it < kMaxIters; ++it) {
    Point next = project_ball(x - tau * phi.value(x), r);
    step = (next - x).norm();
    x = std::move(next);
    if (step <= tol) return x;
  }
  throw NonConvergence("fixedpoint_vi_oracle did not converge", step, kMaxIters);
}

double grid_min_affine_norm(const Point& offset, const Matrix& linear, const ConvexSet& Y,
                            const GridSpec& g) {
  const Eigen::Index n = linear.cols();
  auto objective = [&](const Point& y) { return (offset + linear * y).norm(); };
  auto pts = grid_points(n, Y, g);
  if (pts.empty()) throw InvalidArgument("grid_min_affine_norm: empty grid");
  Point best = pts.front();
  double best_val = objective(best);
  for (const auto& p : pts) {
    const double v = objective(p);
    if (v < best_val) {
      best_val = v;
      best = p;
    }
  }
  // zoom: a box of half-width 4h around the incumbent, 41 points per axis
  Point lo, hi;
  if (const auto* b = std::get_if<BoxSet>(&Y.variant())) {
    lo = b->lower;
    hi = b->upper;
  } else {
    lo = Point::Constant(n, -Y.sup_norm());
    hi = -lo;
  }
  double h = (hi - lo).maxCoeff() / static_cast<double>(g.points_per_axis - 1);
  constexpr std::size_t kZoomPoints = 41;
  while (h > 1e-10) {
    const Point zlo = (best.array() - 4.0 * h).matrix().cwiseMax(lo);
    const Point zhi = (best.array() + 4.0 * h).matrix().cwiseMin(hi);
    const auto zoom = box_grid(zlo, zhi, kZoomPoints, [&Y](const Point& p) {
      return Y.is_ball() ? p.norm() <= Y.sup_norm() : Y.contains(p, 1e-12);
    });
    for (const auto& p : zoom) {
      const double v = objective(p);
      if (v < best_val) {
        best_val = v;
        best = p;
      }
    }
    h = 8.0 * h / static_cast<double>(kZoomPoints - 1);
  }
  return best_val;
}

std::vector<std::uint64_t> derive_seeds(std::size_t starts, std::uint64_t seed) {
  // splitmix64 stream
  std::vector<std::uint64_t> out;
  std::uint64_t state = seed;
  for (std::size_t i = 0; i < starts; ++i) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    out.push_back(z ^ (z >> 31));
  }
  return out;
}

double uniqueness_probe(const std::function<Point(std::uint64_t)>& solver,
                        std::span<const std::uint64_t> seeds) {
  if (seeds.size() < 2) throw InvalidArgument("uniqueness_probe needs at least two starts");
  std::vector<Point> sol(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t i) { sol[i] = solver(seeds[i]); });
  double worst = 0.0;
  for (std::size_t i = 0; i < sol.size(); ++i) {
    for (std::size_t j = i + 1; j < sol.size(); ++j) worst = std::max(worst, (sol[i] - sol[j]).norm());
  }
  return worst;
}

double uniqueness_probe(const std::function<Point(std::uint64_t)>& solver, std::size_t starts,
                        std::uint64_t seed) {
  const auto seeds = derive_seeds(starts, seed);
  return uniqueness_probe(solver, std::span<const std::uint64_t>(seeds));
}

}  // namespace ballsaddle
