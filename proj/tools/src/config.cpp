#include "config.hpp"

#include <cmath>
#include <limits>
#include <set>

namespace ballsaddle::cli {

namespace {

constexpr std::pair<Command, const char*> kCommands[] = {
    {Command::constants, "constants"},     {Command::saddle, "saddle"},
    {Command::vi, "vi"},                   {Command::vi_shifted, "vi-shifted"},
    {Command::best_approx, "best-approx"}, {Command::prox_pair, "prox-pair"},
    {Command::small_radius, "small-radius"}, {Command::verify, "verify"},
};

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError(path + ": " + msg);
}

/// Reads the fields of one JSON object and rejects the ones nobody asked for.
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_.empty() ? "config" : path_, "expected an object");
  }

  std::string path(const std::string& key) const { return join(path_, key); }

  const json* take(const std::string& key) {
    used_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return nullptr;
    return &*it;
  }

  const json& need(const std::string& key) {
    const json* v = take(key);
    if (!v) fail(path(key), "missing required field");
    return *v;
  }

  double number(const json& v, const std::string& key) const {
    if (!v.is_number()) fail(path(key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(path(key), "must be finite");
    return x;
  }

  std::optional<double> opt_number(const std::string& key) {
    const json* v = take(key);
    if (!v) return std::nullopt;
    return number(*v, key);
  }

  double positive(const std::string& key, double def) {
    const auto x = opt_number(key);
    if (!x) return def;
    if (!(*x > 0.0)) fail(path(key), "must be positive");
    return *x;
  }

  double non_negative(const json& v, const std::string& key) const {
    const double x = number(v, key);
    if (x < 0.0) fail(path(key), "must be non-negative");
    return x;
  }

  std::size_t count(const std::string& key, std::size_t def) {
    const json* v = take(key);
    if (!v) return def;
    if (!v->is_number_integer() || v->get<long long>() < 0) {
      fail(path(key), "expected a non-negative integer");
    }
    return v->get<std::size_t>();
  }

  bool boolean(const std::string& key, bool def) {
    const json* v = take(key);
    if (!v) return def;
    if (!v->is_boolean()) fail(path(key), "expected true or false");
    return v->get<bool>();
  }

  std::optional<std::string> string(const std::string& key) {
    const json* v = take(key);
    if (!v) return std::nullopt;
    if (!v->is_string()) fail(path(key), "expected a string");
    return v->get<std::string>();
  }

  Point vector(const json& v, const std::string& key) const {
    if (!v.is_array() || v.empty()) fail(path(key), "expected a non-empty array of numbers");
    Point p(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
      p(static_cast<Eigen::Index>(i)) = number(v[i], key + "[" + std::to_string(i) + "]");
    }
    return p;
  }

  Matrix matrix(const json& v, const std::string& key) const {
    if (!v.is_array() || v.empty()) fail(path(key), "expected a non-empty array of rows");
    const auto rows = static_cast<Eigen::Index>(v.size());
    Eigen::Index cols = -1;
    Matrix m;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const Point row = vector(v[i], key + "[" + std::to_string(i) + "]");
      if (cols < 0) {
        cols = row.size();
        m.resize(rows, cols);
      } else if (row.size() != cols) {
        fail(path(key), "rows have different lengths");
      }
      m.row(static_cast<Eigen::Index>(i)) = row.transpose();
    }
    return m;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) fail(path(it.key()), "unknown field");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

void check_dim(Eigen::Index& n, Eigen::Index got, const std::string& path) {
  if (n == 0) {
    n = got;
  } else if (n != got) {
    fail(path, "dimension mismatch (expected " + std::to_string(n) + ", got " +
                   std::to_string(got) + ")");
  }
}

void check_square(const Matrix& m, Eigen::Index& n, const std::string& path) {
  if (m.rows() != m.cols()) fail(path, "matrix must be square");
  check_dim(n, m.rows(), path);
}

ProblemSpec parse_problem(const json& j) {
  Fields f(j, "problem");
  ProblemSpec p;
  const auto kind = f.string("kind");
  if (!kind) fail("problem.kind", "missing required field");
  p.kind = *kind;
  if (!p.is_map() && p.kind != "linear" && p.kind != "bilinear") {
    fail("problem.kind", "unknown kind '" + p.kind +
                             "' (expected constant, affine, quadratic, linear or bilinear)");
  }
  if (!f.take("rho")) fail("problem.rho", "missing required field");
  p.rho = f.positive("rho", 1.0);

  Eigen::Index n = 0;
  if (const json* d = f.take("dimension")) {
    if (!d->is_number_integer() || d->get<long long>() <= 0) {
      fail("problem.dimension", "expected a positive integer");
    }
    n = d->get<Eigen::Index>();
  }

  if (p.kind == "constant" || p.kind == "linear") {
    p.c = f.vector(f.need("c"), "c");
    check_dim(n, p.c.size(), "problem.c");
  } else if (p.kind == "affine") {
    p.A = f.matrix(f.need("A"), "A");
    check_square(p.A, n, "problem.A");
    p.b = f.vector(f.need("b"), "b");
    check_dim(n, p.b.size(), "problem.b");
  } else if (p.kind == "quadratic") {
    const json& q = f.need("Q");
    if (!q.is_array() || q.empty()) fail("problem.Q", "expected a non-empty array of matrices");
    for (std::size_t i = 0; i < q.size(); ++i) {
      const std::string key = "Q[" + std::to_string(i) + "]";
      p.Q.push_back(f.matrix(q[i], key));
      check_square(p.Q.back(), n, "problem." + key);
    }
    check_dim(n, static_cast<Eigen::Index>(p.Q.size()), "problem.Q");
    const json* a = f.take("A");
    p.A = a ? f.matrix(*a, "A") : Matrix::Zero(n, n);
    check_square(p.A, n, "problem.A");
    const json* b = f.take("b");
    p.b = b ? f.vector(*b, "b") : Point::Zero(n);
    check_dim(n, p.b.size(), "problem.b");
  } else {
    p.B = f.matrix(f.need("B"), "B");
    check_square(p.B, n, "problem.B");
    const json* c = f.take("c");
    p.c = c ? f.vector(*c, "c") : Point::Zero(n);
    check_dim(n, p.c.size(), "problem.c");
  }
  p.dimension = n;

  if (const json* a = f.take("analytic_constants")) {
    if (!p.is_map()) fail("problem.analytic_constants", "only maps declare constants");
    Fields af(*a, "problem.analytic_constants");
    AnalyticConstants k;
    k.theta = Constant{af.non_negative(af.need("theta"), "theta"), Certification::analytic};
    k.gamma = Constant{af.non_negative(af.need("gamma"), "gamma"), Certification::analytic};
    if (const json* e = af.take("eta")) {
      k.eta = Constant{af.non_negative(*e, "eta"), Certification::analytic};
    }
    af.finish();
    p.declared = k;
  }
  p.use_analytic = f.boolean("use_analytic", true);
  f.finish();
  return p;
}

SetSpec parse_set(const json& j, const std::string& path, Eigen::Index n) {
  Fields f(j, path);
  SetSpec s;
  s.kind = f.string("kind").value_or("ball");
  if (s.kind == "ball") {
    if (!f.take("radius")) fail(path + ".radius", "missing required field");
    s.radius = f.positive("radius", 1.0);
  } else if (s.kind == "box") {
    s.lower = f.vector(f.need("lower"), "lower");
    s.upper = f.vector(f.need("upper"), "upper");
    Eigen::Index m = n;
    check_dim(m, s.lower.size(), path + ".lower");
    check_dim(m, s.upper.size(), path + ".upper");
    if ((s.lower.array() > s.upper.array()).any()) fail(path, "lower exceeds upper");
  } else {
    fail(path + ".kind", "unknown set kind '" + s.kind + "' (expected ball or box)");
  }
  f.finish();
  return s;
}

Tolerances parse_tolerances(const json& j) {
  Fields f(j, "tolerances");
  Tolerances t;
  t.tol = f.positive("tol", t.tol);
  t.max_iters = f.count("max_iters", t.max_iters);
  if (t.max_iters == 0) fail("tolerances.max_iters", "must be positive");
  t.strict_margin = f.positive("strict_margin", t.strict_margin);
  t.check_tol = f.positive("check_tol", t.check_tol);
  t.exclusion_factor = f.positive("exclusion_factor", t.exclusion_factor);
  t.check_samples = f.count("check_samples", t.check_samples);
  t.constant_samples = f.count("constant_samples", t.constant_samples);
  t.uniqueness_starts = f.count("uniqueness_starts", t.uniqueness_starts);
  t.epsilon = f.positive("epsilon", t.epsilon);
  if (t.epsilon >= 1.0) fail("tolerances.epsilon", "must be below 1");
  f.finish();
  return t;
}

json vec(const Point& p) { return std::vector<double>(p.data(), p.data() + p.size()); }

json mat(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vec(m.row(i).transpose()));
  return rows;
}

json set_json(const SetSpec& s) {
  if (s.kind == "ball") return {{"kind", "ball"}, {"radius", s.radius}};
  return {{"kind", "box"}, {"lower", vec(s.lower)}, {"upper", vec(s.upper)}};
}

}  // namespace

const char* to_string(Command c) noexcept {
  for (const auto& [cmd, name] : kCommands) {
    if (cmd == c) return name;
  }
  return "?";
}

std::optional<Command> command_from_string(const std::string& s) {
  for (const auto& [cmd, name] : kCommands) {
    if (s == name) return cmd;
  }
  return std::nullopt;
}

RunConfig parse_config(const json& doc) {
  Fields f(doc, "");
  RunConfig cfg;
  const auto cmd = f.string("command");
  if (!cmd) fail("command", "missing required field");
  const auto c = command_from_string(*cmd);
  if (!c) fail("command", "unknown command '" + *cmd + "'");
  cfg.command = *c;
  if (cfg.command == Command::verify) {
    fail("command", "verify takes a certificate, not a config");
  }
  cfg.problem = parse_problem(f.need("problem"));
  const Eigen::Index n = cfg.problem.dimension;
  if (f.take("r")) cfg.r = f.positive("r", 1.0);
  if (const json* s = f.take("seed")) {
    if (!s->is_number_unsigned()) fail("seed", "expected a non-negative integer");
    cfg.seed = s->get<std::uint64_t>();
  }
  cfg.heuristic = f.boolean("heuristic", false);
  if (const json* t = f.take("tolerances")) cfg.tolerances = parse_tolerances(*t);
  if (const auto m = f.string("mode")) {
    if (*m != "vi" && *m != "ba") fail("mode", "expected vi or ba");
    cfg.mode = *m;
  }
  if (const json* y = f.take("Y")) cfg.Y = parse_set(*y, "Y", n);
  if (const json* t = f.take("T")) cfg.T = parse_set(*t, "T", n);
  if (const json* w = f.take("w")) {
    cfg.w = f.vector(*w, "w");
    Eigen::Index m = n;
    check_dim(m, cfg.w->size(), "w");
  }
  f.finish();

  if (cfg.r && *cfg.r > cfg.problem.rho) fail("r", "must not exceed problem.rho");
  if (cfg.command == Command::vi_shifted && !cfg.w) fail("w", "required by vi-shifted");
  if (!cfg.problem.is_map() && cfg.command != Command::saddle &&
      cfg.command != Command::constants) {
    fail("problem.kind", "'" + cfg.problem.kind + "' payoffs only support saddle and constants");
  }
  return cfg;
}

RunConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  return parse_config(doc);
}

json to_json(const RunConfig& cfg) {
  const ProblemSpec& p = cfg.problem;
  json prob = {{"kind", p.kind}, {"rho", p.rho}, {"dimension", p.dimension},
               {"use_analytic", p.use_analytic}};
  if (p.kind == "constant" || p.kind == "linear") prob["c"] = vec(p.c);
  if (p.kind == "affine" || p.kind == "quadratic") {
    prob["A"] = mat(p.A);
    prob["b"] = vec(p.b);
  }
  if (p.kind == "quadratic") {
    prob["Q"] = json::array();
    for (const auto& q : p.Q) prob["Q"].push_back(mat(q));
  }
  if (p.kind == "bilinear") {
    prob["B"] = mat(p.B);
    prob["c"] = vec(p.c);
  }
  if (p.declared) {
    json a = {{"theta", p.declared->theta.value}, {"gamma", p.declared->gamma.value}};
    if (p.declared->eta) a["eta"] = p.declared->eta->value;
    prob["analytic_constants"] = a;
  }
  const Tolerances& t = cfg.tolerances;
  json out = {
      {"command", to_string(cfg.command)},
      {"problem", prob},
      {"seed", cfg.seed},
      {"heuristic", cfg.heuristic},
      {"mode", cfg.mode},
      {"tolerances",
       {{"tol", t.tol},
        {"max_iters", t.max_iters},
        {"strict_margin", t.strict_margin},
        {"check_tol", t.check_tol},
        {"exclusion_factor", t.exclusion_factor},
        {"check_samples", t.check_samples},
        {"constant_samples", t.constant_samples},
        {"uniqueness_starts", t.uniqueness_starts},
        {"epsilon", t.epsilon}}},
  };
  if (cfg.r) out["r"] = *cfg.r;
  if (cfg.Y) out["Y"] = set_json(*cfg.Y);
  if (cfg.T) out["T"] = set_json(*cfg.T);
  if (cfg.w) out["w"] = vec(*cfg.w);
  return out;
}

ConvexSet make_set(const SetSpec& s) {
  if (s.kind == "ball") return ConvexSet::ball(s.radius);
  return ConvexSet::box(s.lower, s.upper);
}

SmoothMap make_problem_map(const ProblemSpec& p) {
  SmoothMap m;
  if (p.kind == "constant") {
    m = make_constant(p.c, p.rho);
  } else if (p.kind == "affine") {
    m = make_affine(p.A, p.b, p.rho);
  } else if (p.kind == "quadratic") {
    m = make_quadratic(p.A, p.b, p.Q, p.rho);
  } else {
    throw ConfigError("problem.kind: '" + p.kind + "' is not a map");
  }
  if (p.declared) {
    AnalyticConstants k = *p.declared;
    // eta is not declared: keep the built-in bound when one exists
    if (!k.eta && m.analytic) k.eta = m.analytic->eta;
    m.analytic = k;
    m.analytic_at = nullptr;
  }
  return m;
}

}  // namespace ballsaddle::cli
