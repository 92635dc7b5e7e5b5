#pragma once

#include "config.hpp"

#include <ballsaddle/ballsaddle.hpp>
#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace ballsaddle::cli {

json point_json(const Point& p);
/// Throws ConfigError naming `path` unless `j` is a non-empty numeric array.
Point point_from_json(const json& j, const std::string& path);

json constant_json(const Constant& c);
json constants_json(const ConstantsReport& r);
/// Non-finite values (an empty check has worst = -inf) are written as null.
json check_json(const CheckReport& c);
json checks_json(const std::vector<CheckReport>& checks);

/// One line per check, failing ones with their witness.
std::string describe_checks(const std::vector<CheckReport>& checks);

}  // namespace ballsaddle::cli
