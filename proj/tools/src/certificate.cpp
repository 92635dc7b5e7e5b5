#include "certificate.hpp"

#include <cmath>
#include <sstream>

namespace ballsaddle::cli {

namespace {

json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string fmt_point(const Point& p) {
  std::ostringstream os;
  os.precision(10);
  os << "[";
  for (Eigen::Index i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p(i);
  os << "]";
  return os.str();
}

}  // namespace

json point_json(const Point& p) {
  json out = json::array();
  for (Eigen::Index i = 0; i < p.size(); ++i) out.push_back(num(p(i)));
  return out;
}

Point point_from_json(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ConfigError(path + ": expected a non-empty array of numbers");
  Point p(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(path + "[" + std::to_string(i) + "]: expected a number");
    p(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return p;
}

json constant_json(const Constant& c) {
  return {{"value", num(c.value)}, {"certification", to_string(c.how)}};
}

json constants_json(const ConstantsReport& r) {
  json out = {{"mode", to_string(r.mode)},
              {"rho", r.rho},
              {"r_max", r.r_max},
              {"hypotheses_hold", r.hypotheses_hold},
              {"certified", r.certified()}};
  auto put = [&](const char* key, const std::optional<Constant>& c) {
    if (c) out[key] = constant_json(*c);
  };
  put("theta", r.theta);
  put("gamma", r.gamma);
  put("eta", r.eta);
  put("M", r.M);
  put("L", r.L);
  put("sigma", r.sigma);
  put("delta", r.delta);
  return out;
}

json check_json(const CheckReport& c) {
  json out = {{"name", c.name},
              {"passed", c.passed},
              {"samples", c.samples},
              {"excluded", c.excluded},
              {"worst", num(c.worst)},
              {"threshold", num(c.threshold)}};
  if (c.witness) out["witness"] = point_json(*c.witness);
  if (c.witness_index) out["witness_index"] = *c.witness_index;
  return out;
}

json checks_json(const std::vector<CheckReport>& checks) {
  json out = json::array();
  for (const auto& c : checks) out.push_back(check_json(c));
  return out;
}

std::string describe_checks(const std::vector<CheckReport>& checks) {
  std::ostringstream os;
  os.precision(6);
  for (const auto& c : checks) {
    os << "  " << (c.passed ? "ok  " : "FAIL") << " " << c.name << "  worst=" << c.worst
       << " threshold=" << c.threshold << " samples=" << c.samples;
    if (!c.passed && c.witness) os << "  witness=" << fmt_point(*c.witness);
    os << "\n";
  }
  return os.str();
}

}  // namespace ballsaddle::cli
