#pragma once

#include <ballsaddle/ballsaddle.hpp>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ballsaddle::cli {

using nlohmann::json;

/// Malformed config: the message names the offending field path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { constants, saddle, vi, vi_shifted, best_approx, prox_pair, small_radius, verify };

const char* to_string(Command c) noexcept;
std::optional<Command> command_from_string(const std::string& s);

/// A map (constant, affine, quadratic) or a direct payoff (linear, bilinear).
struct ProblemSpec {
  std::string kind;
  double rho = 1.0;
  Eigen::Index dimension = 0;
  Point c;
  Matrix A;
  Point b;
  std::vector<Matrix> Q;
  Matrix B;
  std::optional<AnalyticConstants> declared;
  bool use_analytic = true;

  bool is_map() const { return kind == "constant" || kind == "affine" || kind == "quadratic"; }
};

struct SetSpec {
  std::string kind = "ball";
  double radius = 1.0;
  Point lower;
  Point upper;
};

struct Tolerances {
  double tol = 1e-8;
  std::size_t max_iters = 1'000'000;
  double strict_margin = 1e-9;
  double check_tol = 1e-7;
  double exclusion_factor = 1e-4;
  std::size_t check_samples = 10000;
  std::size_t constant_samples = 1000;
  std::size_t uniqueness_starts = 16;
  double epsilon = 0.5;
};

struct RunConfig {
  Command command = Command::vi;
  ProblemSpec problem;
  std::optional<double> r;
  std::uint64_t seed = 0;
  bool heuristic = false;
  Tolerances tolerances;
  /// "vi" or "ba": which construction `constants`, `saddle` and `small-radius` use.
  std::string mode = "vi";
  std::optional<SetSpec> Y;
  std::optional<SetSpec> T;
  std::optional<Point> w;
  /// verify only: the certificate being audited.
  std::optional<json> certificate;
};

/// Parses and validates a config document. Unknown fields, wrong types and
/// non-positive radii or tolerances raise ConfigError with the field path.
RunConfig parse_config(const json& doc);
RunConfig parse_config_text(const std::string& text);

/// The config with every default filled in; parse_config(to_json(c)) == c.
json to_json(const RunConfig& cfg);

ConvexSet make_set(const SetSpec& s);
SmoothMap make_problem_map(const ProblemSpec& p);

}  // namespace ballsaddle::cli
