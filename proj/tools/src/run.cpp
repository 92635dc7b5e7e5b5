#include "run.hpp"

#include "certificate.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unistd.h>

namespace ballsaddle::cli {

namespace {

struct Context {
  EstimationOptions eo;
  SaddleConfig sc;
  SolveOptions so;
};

Context make_context(const RunConfig& cfg) {
  const Tolerances& t = cfg.tolerances;
  Context c;
  c.eo = EstimationOptions{t.constant_samples, cfg.seed, cfg.problem.use_analytic};
  c.sc.tol = t.tol;
  c.sc.max_iters = t.max_iters;
  c.sc.strict_margin = t.strict_margin;
  c.sc.check_tol = t.check_tol;
  c.sc.exclusion_factor = t.exclusion_factor;
  c.so = SolveOptions{t.check_samples, cfg.seed, t.uniqueness_starts, cfg.heuristic};
  return c;
}

/// Everything a command needs before solving: the map it works on (shifted or
/// restricted where applicable), its constants, and the sets.
struct Setup {
  ConstantsReport report;
  std::optional<SmoothMap> map;
  std::optional<Payoff> payoff;
  ConvexSet Y = ConvexSet::ball(1.0);
  std::optional<double> r_star;
};

ConvexSet y_set(const RunConfig& cfg) {
  return cfg.Y ? make_set(*cfg.Y) : ConvexSet::ball(cfg.problem.rho);
}

Payoff direct_payoff(const RunConfig& cfg, const ConvexSet& Y) {
  const ProblemSpec& p = cfg.problem;
  if (p.kind == "linear") return linear_payoff(p.c, p.rho, Y);
  if (p.kind == "bilinear") return bilinear_payoff(p.B, p.c, p.rho, Y);
  const SmoothMap m = make_problem_map(p);
  if (cfg.mode == "ba") return ba_payoff(m, Y);
  return vi_payoff(m);
}

Setup prepare(const RunConfig& cfg, const EstimationOptions& eo) {
  Setup s;
  s.Y = y_set(cfg);
  switch (cfg.command) {
    case Command::saddle:
      s.payoff = direct_payoff(cfg, s.Y);
      s.Y = s.payoff->y_set;
      s.report = saddle_report(*s.payoff, eo);
      return s;
    case Command::constants:
      if (!cfg.problem.is_map()) {
        s.payoff = direct_payoff(cfg, s.Y);
        s.report = saddle_report(*s.payoff, eo);
        return s;
      }
      s.map = make_problem_map(cfg.problem);
      s.report = cfg.mode == "ba" ? ba_report(*s.map, s.Y, eo) : vi_report(*s.map, eo);
      return s;
    case Command::vi:
      s.map = make_problem_map(cfg.problem);
      s.report = vi_report(*s.map, eo);
      return s;
    case Command::vi_shifted: {
      s.map = shifted(make_problem_map(cfg.problem), *cfg.w);
      s.report = vi_report(*s.map, EstimationOptions{1000, cfg.seed, true});
      return s;
    }
    case Command::small_radius: {
      const SmoothMap m = make_problem_map(cfg.problem);
      SmallRadius sr = cfg.mode == "ba" ? ba_small_radius(m, cfg.tolerances.epsilon)
                                        : small_radius(m, cfg.tolerances.epsilon);
      s.map = sr.map;
      s.report = sr.report;
      s.r_star = sr.r_star;
      s.Y = ConvexSet::ball(sr.r_star);
      return s;
    }
    case Command::prox_pair:
      s.map = make_problem_map(cfg.problem);
      s.report = ba_report(*s.map, s.Y, eo);
      return s;
    case Command::best_approx:
      s.map = make_problem_map(cfg.problem);
      s.Y = ConvexSet::ball(cfg.problem.rho);
      s.report = ba_report(*s.map, s.Y, eo);
      return s;
    case Command::verify:
      break;
  }
  throw ConfigError("command: verify has no setup");
}

double default_radius(const RunConfig& cfg, const Setup& s) {
  if (cfg.r) return *cfg.r;
  if (cfg.command == Command::vi_shifted) return cfg.problem.rho;
  return s.report.r_max;
}

ConvexSet t_set(const RunConfig& cfg, const Setup& s, double r) {
  if (cfg.T) return make_set(*cfg.T);
  if (cfg.command == Command::saddle) return s.Y;
  return ConvexSet::ball(r);
}

bool is_vi_family(const RunConfig& cfg) {
  return cfg.command == Command::vi || cfg.command == Command::vi_shifted ||
         (cfg.command == Command::small_radius && cfg.mode == "vi");
}

bool is_ba_family(const RunConfig& cfg) {
  return cfg.command == Command::best_approx ||
         (cfg.command == Command::small_radius && cfg.mode == "ba");
}

/// Result of one solve, independent of the command.
struct Solved {
  RunMode mode = RunMode::certified;
  ConstantsReport constants;
  double r = 0.0;
  std::optional<Point> x_star;
  std::optional<Point> y_star;
  bool y_star_unique = true;
  std::vector<CheckReport> checks;
  json residuals = json::object();
};

void saddle_residuals(json& res, const SaddlePoint& sp, double gap) {
  res["saddle_residual"] = sp.residual;
  res["iterations"] = sp.iterations;
  res["step"] = sp.step;
  res["minimax_gap"] = gap;
}

Solved from_vi(const VICertificate& c) {
  Solved s;
  s.mode = c.mode;
  s.constants = c.constants;
  s.r = c.r;
  s.x_star = c.x_star;
  s.y_star = c.y_star;
  s.y_star_unique = c.saddle.y_star_unique;
  s.checks = c.checks;
  saddle_residuals(s.residuals, c.saddle, c.minimax_gap);
  s.residuals["collapse_gap"] = c.collapse_gap;
  s.residuals["first_form"] = c.first;
  s.residuals["second_form"] = c.second;
  s.residuals["antipode_margin"] = c.antipode_margin;
  s.residuals["phi_norm"] = c.phi_norm;
  s.residuals["uniqueness"] = {{"starts", c.uniqueness.starts},
                               {"max_pairwise", c.uniqueness.max_pairwise},
                               {"candidates", c.uniqueness.candidates},
                               {"refuted", c.uniqueness.refuted}};
  return s;
}

Solved from_ba(const BACertificate& c) {
  Solved s;
  s.mode = c.mode;
  s.constants = c.constants;
  s.r = c.r;
  s.x_star = c.x_star;
  s.y_star = c.y_star;
  s.y_star_unique = c.saddle.y_star_unique;
  s.checks = c.checks;
  saddle_residuals(s.residuals, c.saddle, c.minimax_gap);
  s.residuals["dist_gap"] = c.dist_gap;
  s.residuals["proximity_margin"] = c.proximity_margin;
  if (c.collapse_gap) s.residuals["collapse_gap"] = *c.collapse_gap;
  if (c.uniqueness) {
    s.residuals["uniqueness"] = {{"starts", c.uniqueness->starts},
                                 {"max_pairwise", c.uniqueness->max_pairwise},
                                 {"candidates", c.uniqueness->candidates},
                                 {"refuted", c.uniqueness->refuted}};
  }
  return s;
}

Solved solve(const RunConfig& cfg) {
  Context ctx = make_context(cfg);
  const Setup s = prepare(cfg, ctx.eo);

  if (cfg.command == Command::constants) {
    Solved out;
    out.constants = s.report;
    out.mode = s.report.certified() ? RunMode::certified : RunMode::heuristic;
    out.r = s.report.r_max;
    return out;
  }
  // vi-shifted reports its own gate; everything else needs sigma (delta) > 0
  // before a radius or T can be built
  if (!s.report.hypotheses_hold && cfg.command != Command::vi_shifted) {
    resolve_run_mode(s.report, s.report.rho, ctx.so);
  }
  const double r = default_radius(cfg, s);
  switch (cfg.command) {
    case Command::vi:
    case Command::small_radius:
      if (cfg.mode == "ba" && cfg.command == Command::small_radius) {
        Solved out = from_ba(solve_best_approx(*s.map, r, s.report, ctx.sc, ctx.so));
        out.residuals["r_star"] = *s.r_star;
        return out;
      } else {
        Solved out = from_vi(solve_vi(*s.map, r, s.report, ctx.sc, ctx.so));
        if (s.r_star) out.residuals["r_star"] = *s.r_star;
        return out;
      }
    case Command::vi_shifted:
      return from_vi(
          solve_vi_shifted(make_problem_map(cfg.problem), *cfg.w, r, ctx.sc, ctx.so));
    case Command::best_approx:
      return from_ba(solve_best_approx(*s.map, r, s.report, ctx.sc, ctx.so));
    case Command::prox_pair:
      return from_ba(solve_prox_pair(*s.map, s.Y, t_set(cfg, s, r), r, s.report, ctx.sc, ctx.so));
    case Command::saddle: {
      Solved out;
      out.constants = s.report;
      out.mode = resolve_run_mode(s.report, r, ctx.so);
      out.r = r;
      SaddleConfig sc = ctx.sc;
      sc.r = r;
      sc.T = t_set(cfg, s, r);
      sc.L = s.report.L->value;
      if (out.mode == RunMode::certified) sc.certified_r_max = s.report.r_max;
      const SaddlePoint sp = solve_saddle(*s.payoff, sc);
      const SaddleCheck ch = check_saddle(*s.payoff, sp, sc, ctx.so.check_samples, ctx.so.seed);
      out.x_star = sp.x_star;
      out.y_star = sp.y_star;
      out.y_star_unique = sp.y_star_unique;
      out.checks = ch.checks;
      saddle_residuals(out.residuals, sp, ch.minimax_gap);
      return out;
    }
    default:
      break;
  }
  throw ConfigError("command: not runnable");
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json document_head(const RunConfig& cfg) {
  return {{"theorem", theorem_for(cfg)}, {"command", to_string(cfg.command)}};
}

Outcome error_outcome(json doc, int code, const std::string& kind, const std::string& message,
                      json extra = json::object()) {
  json err = {{"kind", kind}, {"message", message}};
  err.update(extra);
  doc["error"] = err;
  doc["passed"] = false;
  Outcome o;
  o.exit_code = code;
  o.summary = kind + ": " + message + "\n";
  o.document = std::move(doc);
  return o;
}

/// Runs `body`, mapping library errors to exit codes.
template <class F>
Outcome guarded(json head, F&& body) {
  try {
    return body();
  } catch (const HypothesisViolation& e) {
    return error_outcome(std::move(head), kHypothesisViolation, "hypothesis_violation", e.what(),
                         {{"deficit", e.deficit()}});
  } catch (const NonConvergence& e) {
    return error_outcome(std::move(head), kNonConvergence, "non_convergence", e.what(),
                         {{"residual", e.residual()}, {"iterations", e.iterations()}});
  } catch (const CertificationError& e) {
    return error_outcome(std::move(head), kCheckFailure, "certification_error", e.what());
  } catch (const ConfigError& e) {
    return error_outcome(std::move(head), kUsage, "config_error", e.what());
  } catch (const Error& e) {
    return error_outcome(std::move(head), kUsage, "invalid_input", e.what());
  }
}

std::string fmt(const Point& p) {
  std::ostringstream os;
  os.precision(10);
  os << "[";
  for (Eigen::Index i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p(i);
  os << "]";
  return os.str();
}

std::string summarize(const json& doc, const std::vector<CheckReport>& checks,
                      const std::optional<Point>& x_star) {
  std::ostringstream os;
  os << "theorem " << doc["theorem"].get<std::string>() << " (" << doc["command"].get<std::string>()
     << ", " << doc["mode"].get<std::string>() << ")\n";
  os << "  r_max = " << doc["constants"]["r_max"].get<double>() << "\n";
  if (x_star) os << "  x* = " << fmt(*x_star) << "\n";
  std::size_t passed = 0;
  for (const auto& c : checks) passed += c.passed ? 1 : 0;
  os << "  checks passed: " << passed << "/" << checks.size() << "\n";
  os << describe_checks(checks);
  return os.str();
}

// ---- verify ----

CheckReport grid_sweep(std::string name, Eigen::Index n, double r, const Point& x_star,
                       double exclusion, double threshold,
                       const std::function<double(const Point&)>& value) {
  const auto pts = grid_points(n, ConvexSet::ball(r), GridSpec{101});
  std::vector<double> val(pts.size());
  std::vector<bool> skip(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    skip[i] = (pts[i] - x_star).norm() <= exclusion;
    val[i] = skip[i] ? 0.0 : value(pts[i]);
  });
  return reduce_check(std::move(name), pts, val, skip, threshold, false);
}

std::vector<CheckReport> verify_checks(const RunConfig& cfg, const json& cert, RunMode& mode_out,
                                       ConstantsReport& constants_out) {
  Context ctx = make_context(cfg);
  const Setup s = prepare(cfg, ctx.eo);
  constants_out = s.report;

  const json& sol = cert.at("solution");
  const json& recorded = cert.at("constants");
  std::vector<CheckReport> checks;

  const double r_max_rec = recorded.at("r_max").get<double>();
  CheckReport cm = scalar_check("verify.constants_match",
                                std::abs(s.report.r_max - r_max_rec) / std::max(1.0, s.report.r_max),
                                1e-9, Point::Constant(1, s.report.r_max));
  if (recorded.at("hypotheses_hold").get<bool>() != s.report.hypotheses_hold) cm.passed = false;
  checks.push_back(cm);

  const std::string mode_name = cert.at("mode").get<std::string>();
  mode_out = mode_name == "heuristic" ? RunMode::heuristic : RunMode::certified;
  if (cfg.command == Command::constants) return checks;

  const double r = sol.at("r").get<double>();
  const Point x = point_from_json(sol.at("x_star"), "solution.x_star");
  SaddlePoint sp;
  sp.x_star = x;
  sp.y_star = point_from_json(sol.at("y_star"), "solution.y_star");
  sp.y_star_unique = sol.value("y_star_unique", true);
  if (x.size() != sp.y_star.size() || x.size() != cfg.problem.dimension) {
    throw ConfigError("solution: dimension does not match the problem");
  }

  SaddleConfig sc = ctx.sc;
  sc.r = r;
  sc.T = t_set(cfg, s, r);
  if (mode_out == RunMode::certified) sc.certified_r_max = s.report.r_max;
  const std::uint64_t seed = cfg.seed;
  const std::size_t n_samples = ctx.so.check_samples;
  const Eigen::Index n = x.size();
  const double excl = sc.exclusion_factor * r;

  auto add = [&](std::vector<CheckReport> more) {
    checks.insert(checks.end(), more.begin(), more.end());
  };

  if (cfg.command == Command::saddle) {
    sc.L = s.report.L->value;
    add(check_saddle(*s.payoff, sp, sc, n_samples, seed).checks);
  } else if (is_vi_family(cfg)) {
    const SmoothMap& phi = *s.map;
    sc.L = s.report.M->value;
    add(check_saddle(vi_payoff(phi, *s.report.M, s.report.theta->value), sp, sc, n_samples, seed)
            .checks);
    checks.push_back(scalar_check("vi.collapse", (x - sp.y_star).norm(), 1e-6, sp.y_star));
    checks.push_back(scalar_check("vi.sphere", std::abs(x.norm() - r), 1e-6, x));
    VICheck vc = check_vi(phi, x, r, n_samples, seed + 1, sc.strict_margin, sc.exclusion_factor);
    checks.push_back(vc.first);
    checks.push_back(vc.second);
    if (n <= 2) {
      const Point fx = phi.value(x);
      checks.push_back(grid_sweep("verify.grid_vi", n, r, x, excl, -sc.strict_margin,
                                  [&](const Point& p) {
                                    return std::max(fx.dot(x - p), phi.value(p).dot(x - p));
                                  }));
    }
  } else {
    const SmoothMap& f = *s.map;
    const bool best = is_ba_family(cfg);
    const ConvexSet Y = best ? ConvexSet::ball(f.rho) : s.Y;
    sc.L = s.report.L->value;
    add(check_saddle(ba_payoff(f, Y, *s.report.L, s.report.theta->value), sp, sc, n_samples, seed)
            .checks);
    const Point fx = f.value(x);
    checks.push_back(scalar_check("ba.distance_identity",
                                  std::abs((fx - sp.y_star).norm() -
                                           (fx - project_set(fx, sc.T)).norm()),
                                  1e-6, sp.y_star));
    if (best) {
      checks.push_back(scalar_check("ba.collapse", (x - sp.y_star).norm(), 1e-6, sp.y_star));
      checks.push_back(check_best_approx_inequality(f, x, r, n_samples, seed + 2,
                                                    sc.strict_margin, sc.exclusion_factor));
      if (n <= 2) {
        checks.push_back(grid_sweep("verify.grid_best_approximation", n, r, x, excl,
                                    -sc.strict_margin, [&](const Point& p) {
                                      const Point fp = f.value(p);
                                      return (fp - x).norm() - (fp - p).norm();
                                    }));
      }
    }
  }
  return checks;
}

}  // namespace

std::string theorem_for(const RunConfig& cfg) {
  switch (cfg.command) {
    case Command::constants:
      if (!cfg.problem.is_map()) return "1";
      return cfg.mode == "ba" ? "5" : "2";
    case Command::saddle: return "1";
    case Command::vi: return "2";
    case Command::small_radius: return cfg.mode == "ba" ? "7" : "3";
    case Command::vi_shifted: return "4";
    case Command::prox_pair: return "5";
    case Command::best_approx: return "6";
    case Command::verify: break;
  }
  return "?";
}

Outcome run(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  json head = document_head(cfg);
  head["config"] = to_json(cfg);
  head["seed"] = cfg.seed;
  Outcome o = guarded(head, [&]() {
    const Solved s = solve(cfg);
    json doc = head;
    doc["mode"] = to_string(s.mode);
    doc["constants"] = constants_json(s.constants);
    json sol = {{"r", s.r}};
    if (s.x_star) sol["x_star"] = point_json(*s.x_star);
    if (s.y_star) {
      sol["y_star"] = point_json(*s.y_star);
      sol["y_star_unique"] = s.y_star_unique;
    }
    doc["solution"] = sol;
    doc["config"]["r"] = s.r;
    doc["checks"] = checks_json(s.checks);
    doc["residuals"] = s.residuals;
    Outcome out;
    if (cfg.command == Command::constants && !s.constants.hypotheses_hold) {
      out.exit_code = kHypothesisViolation;
      doc["error"] = {{"kind", "hypothesis_violation"},
                      {"message", "sigma (or delta) vanishes; no admissible radius"}};
    } else {
      out.exit_code = all_passed(s.checks) ? kPass : kCheckFailure;
    }
    doc["passed"] = out.exit_code == kPass;
    out.summary = summarize(doc, s.checks, s.x_star);
    out.document = std::move(doc);
    return out;
  });
  o.document["wall_time"] = seconds_since(t0);
  return o;
}

Outcome verify(const json& certificate) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!certificate.is_object() || !certificate.contains("config") ||
      !certificate.contains("solution") || !certificate.contains("constants")) {
    Outcome o = error_outcome({{"command", "verify"}}, kUsage, "config_error",
                              "certificate: expected an object with config, constants and solution");
    o.document["wall_time"] = seconds_since(t0);
    return o;
  }
  json head = {{"command", "verify"}, {"theorem", certificate.value("theorem", "?")}};
  Outcome o = guarded(head, [&]() {
    const RunConfig cfg = parse_config(certificate.at("config"));
    json doc = head;
    doc["verified_command"] = to_string(cfg.command);
    doc["seed"] = cfg.seed;
    RunMode mode = RunMode::certified;
    ConstantsReport constants;
    const std::vector<CheckReport> checks = verify_checks(cfg, certificate, mode, constants);
    doc["mode"] = to_string(mode);
    doc["constants"] = constants_json(constants);
    doc["solution"] = certificate.at("solution");
    doc["checks"] = checks_json(checks);
    Outcome out;
    out.exit_code = all_passed(checks) ? kPass : kCheckFailure;
    doc["passed"] = out.exit_code == kPass;
    std::optional<Point> x;
    if (certificate.at("solution").contains("x_star")) {
      x = point_from_json(certificate.at("solution").at("x_star"), "solution.x_star");
    }
    out.summary = summarize(doc, checks, x);
    out.document = std::move(doc);
    return out;
  });
  o.document["wall_time"] = seconds_since(t0);
  return o;
}

void write_atomically(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f << text;
    f.flush();
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
  }
  fs::rename(tmp, target);
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sphere-localised saddle points, variational inequalities and best approximations"};
  app.name("ballsaddle");
  std::string command;
  std::string config_path;
  std::string out_path;
  double r = 0.0;
  std::uint64_t seed = 0;
  bool heuristic = false;
  app.add_option("command", command,
                 "constants | saddle | vi | vi-shifted | best-approx | prox-pair | small-radius | verify")
      ->required();
  app.add_option("--config", config_path, "JSON config (a certificate for verify)")->required();
  CLI::Option* r_opt = app.add_option("--r", r, "radius, default r_max");
  CLI::Option* seed_opt = app.add_option("--seed", seed, "sampling seed");
  app.add_option("--out", out_path, "write the certificate here instead of stdout");
  app.add_flag("--heuristic", heuristic, "accept sampled constants");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kPass : kUsage;
  }

  const auto cmd = command_from_string(command);
  if (!cmd) {
    err << "error: unknown command '" << command << "'\n";
    return kUsage;
  }

  Outcome outcome;
  try {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot read " + config_path);
    std::stringstream buf;
    buf << in.rdbuf();
    json doc;
    try {
      doc = json::parse(buf.str());
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    if (*cmd == Command::verify) {
      outcome = verify(doc);
    } else {
      if (!doc.is_object()) throw ConfigError("config: expected an object");
      if (doc.contains("command") && doc["command"] != command) {
        throw ConfigError("command: config says " + doc["command"].dump() +
                          " but the command line says \"" + command + "\"");
      }
      doc["command"] = command;
      if (r_opt->count() > 0) doc["r"] = r;
      if (seed_opt->count() > 0) doc["seed"] = seed;
      if (heuristic) doc["heuristic"] = true;
      outcome = run(parse_config(doc));
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  const std::string text = outcome.document.dump(2) + "\n";
  try {
    if (!out_path.empty()) {
      write_atomically(out_path, text);
      out << outcome.summary;
    } else {
      out << text;
      err << outcome.summary;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return outcome.exit_code;
}

}  // namespace ballsaddle::cli
