#include "config.hpp"
#include "run.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace fs = std::filesystem;
using namespace ballsaddle::cli;
using ballsaddle::worker_count;

namespace {

const char* kConstantVi = R"({"command":"vi","problem":{"kind":"constant","c":[1,0],"rho":1.0}})";
const char* kAffineVi =
    R"({"command":"vi","problem":{"kind":"affine","A":[[1,0],[0,1]],"b":[2,0],"rho":1.0}})";
const char* kPsi = R"("problem":{"kind":"quadratic","Q":[[[1,0],[0,1]],[[0,0],[0,0]]],"rho":1.0})";

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("ballsaddle_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
             "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }

  std::string write(const std::string& name, const std::string& text) const {
    const fs::path p = path_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "ballsaddle");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

json strip_time(json doc) {
  doc.erase("wall_time");
  return doc;
}

std::string config_error(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(ParseConfig, MinimalViDefaults) {
  const RunConfig cfg = parse_config_text(kConstantVi);
  EXPECT_EQ(cfg.command, Command::vi);
  EXPECT_FALSE(cfg.r.has_value());
  EXPECT_EQ(cfg.seed, 0u);
  EXPECT_EQ(cfg.problem.dimension, 2);

  const Outcome o = run(cfg);
  ASSERT_EQ(o.exit_code, kPass) << o.summary;
  EXPECT_DOUBLE_EQ(o.document["solution"]["r"].get<double>(), 1.0);
  EXPECT_NEAR(o.document["solution"]["x_star"][0].get<double>(), -1.0, 1e-6);
  EXPECT_NEAR(o.document["solution"]["x_star"][1].get<double>(), 0.0, 1e-6);
  EXPECT_DOUBLE_EQ(o.document["config"]["r"].get<double>(), 1.0);
}

TEST(ParseConfig, EchoesEveryDefault) {
  const json echo = to_json(parse_config_text(kConstantVi));
  for (const char* key : {"tol", "max_iters", "strict_margin", "check_tol", "exclusion_factor",
                          "check_samples", "constant_samples", "uniqueness_starts", "epsilon"}) {
    EXPECT_TRUE(echo["tolerances"].contains(key)) << key;
  }
  EXPECT_EQ(to_json(parse_config(echo)), echo);
}

TEST(ParseConfig, NegativeRhoNamesField) {
  const std::string msg =
      config_error(R"({"command":"vi","problem":{"kind":"constant","c":[1,0],"rho":-1.0}})");
  EXPECT_NE(msg.find("problem.rho"), std::string::npos) << msg;
}

TEST(ParseConfig, UnknownFieldRejected) {
  const std::string msg = config_error(
      R"({"command":"vi","rmax":1,"problem":{"kind":"constant","c":[1,0],"rho":1.0}})");
  EXPECT_NE(msg.find("unknown field"), std::string::npos) << msg;
  EXPECT_NE(msg.find("rmax"), std::string::npos) << msg;
}

TEST(ParseConfig, NestedUnknownFieldHasPath) {
  const std::string msg = config_error(
      R"({"command":"vi","problem":{"kind":"constant","c":[1,0],"rho":1.0,"gama":2}})");
  EXPECT_NE(msg.find("problem.gama"), std::string::npos) << msg;
}

TEST(ParseConfig, DimensionMismatch) {
  EXPECT_FALSE(config_error(
                   R"({"command":"vi","problem":{"kind":"affine","A":[[1,0],[0,1]],"b":[2,0,0],"rho":1.0}})")
                   .empty());
  EXPECT_FALSE(config_error(std::string(R"({"command":"vi-shifted",)") + kPsi + R"(,"w":[16]})")
                   .empty());
}

TEST(ParseConfig, RadiusAboveRhoRejected) {
  const std::string msg = config_error(
      R"({"command":"vi","r":2,"problem":{"kind":"constant","c":[1,0],"rho":1.0}})");
  EXPECT_NE(msg.find("r"), std::string::npos);
  EXPECT_FALSE(msg.empty());
}

TEST(ParseConfig, NonPositiveTolerance) {
  const std::string msg = config_error(
      R"({"command":"vi","tolerances":{"tol":0},"problem":{"kind":"constant","c":[1,0],"rho":1.0}})");
  EXPECT_NE(msg.find("tolerances.tol"), std::string::npos) << msg;
}

TEST(ParseConfig, ShiftedNeedsW) {
  EXPECT_FALSE(config_error(std::string(R"({"command":"vi-shifted",)") + kPsi + "}").empty());
}

TEST(ParseConfig, VerifyIsNotAConfigCommand) {
  EXPECT_FALSE(config_error(
                   R"({"command":"verify","problem":{"kind":"constant","c":[1,0],"rho":1.0}})")
                   .empty());
}

TEST(TheoremFor, Mapping) {
  RunConfig cfg = parse_config_text(kConstantVi);
  EXPECT_EQ(theorem_for(cfg), "2");
  cfg.command = Command::best_approx;
  EXPECT_EQ(theorem_for(cfg), "6");
  cfg.command = Command::small_radius;
  cfg.mode = "ba";
  EXPECT_EQ(theorem_for(cfg), "7");
  cfg.mode = "vi";
  EXPECT_EQ(theorem_for(cfg), "3");
  cfg.command = Command::vi_shifted;
  EXPECT_EQ(theorem_for(cfg), "4");
  cfg.command = Command::prox_pair;
  EXPECT_EQ(theorem_for(cfg), "5");
}

TEST(RunCli, PassingRun) {
  TempDir d;
  const CliResult r = cli({"vi", "--config", d.write("c.json", kConstantVi)});
  EXPECT_EQ(r.code, kPass) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_EQ(doc["theorem"], "2");
  EXPECT_TRUE(doc["passed"].get<bool>());
  EXPECT_TRUE(doc.contains("wall_time"));
  EXPECT_NE(r.err.find("checks passed"), std::string::npos);
}

TEST(RunCli, CommandMismatchIsUsageError) {
  TempDir d;
  const CliResult r = cli({"constants", "--config", d.write("c.json", kAffineVi)});
  EXPECT_EQ(r.code, kUsage);
  EXPECT_NE(r.err.find("command"), std::string::npos);
}

TEST(RunCli, UsageErrors) {
  TempDir d;
  const std::string ok = d.write("c.json", kConstantVi);
  EXPECT_EQ(cli({}).code, kUsage);
  EXPECT_EQ(cli({"vi"}).code, kUsage);
  EXPECT_EQ(cli({"solve", "--config", ok}).code, kUsage);
  EXPECT_EQ(cli({"vi", "--config", d.file("missing.json")}).code, kUsage);
  EXPECT_EQ(cli({"vi", "--config", d.write("bad.json", "{not json")}).code, kUsage);
  EXPECT_EQ(cli({"best-approx", "--config", ok}).code, kUsage);

  const CliResult neg = cli(
      {"vi", "--config",
       d.write("neg.json", R"({"problem":{"kind":"constant","c":[1,0],"rho":-1.0}})")});
  EXPECT_EQ(neg.code, kUsage);
  EXPECT_NE(neg.err.find("problem.rho"), std::string::npos) << neg.err;
}

TEST(RunCli, CommandLineOverridesConfig) {
  TempDir d;
  const std::string p = d.write("c.json", kConstantVi);
  const CliResult r = cli({"vi", "--config", p, "--r", "0.5", "--seed", "7"});
  ASSERT_EQ(r.code, kPass) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_DOUBLE_EQ(doc["solution"]["r"].get<double>(), 0.5);
  EXPECT_EQ(doc["seed"].get<int>(), 7);
  EXPECT_NEAR(doc["solution"]["x_star"][0].get<double>(), -0.5, 1e-6);
}

TEST(RunCli, HypothesisViolationExitsTwo) {
  TempDir d;
  const CliResult r =
      cli({"vi-shifted", "--config", d.write("s.json", std::string("{") + kPsi + R"(,"w":[15.9,0]})")});
  EXPECT_EQ(r.code, kHypothesisViolation);
  const json doc = json::parse(r.out);
  EXPECT_EQ(doc["error"]["kind"], "hypothesis_violation");
  const std::string msg = doc["error"]["message"];
  EXPECT_NE(msg.find("||w - Psi(0)|| >= 2 M1 rho"), std::string::npos) << msg;
  EXPECT_GT(doc["error"]["deficit"].get<double>(), 0.0);
}

TEST(RunCli, VanishingSigmaExitsTwo) {
  TempDir d;
  const CliResult r = cli(
      {"vi", "--config",
       d.write("z.json", R"({"problem":{"kind":"affine","A":[[1,0],[0,1]],"b":[1,0],"rho":1.0}})")});
  EXPECT_EQ(r.code, kHypothesisViolation) << r.err;
}

TEST(RunCli, VanishingSigmaBeforeRadiusExitsTwo) {
  TempDir d;
  const CliResult r = cli(
      {"prox-pair", "--config",
       d.write("z.json", R"({"problem":{"kind":"affine","A":[[1,0],[0,1]],"b":[0,0],"rho":1.0}})")});
  EXPECT_EQ(r.code, kHypothesisViolation) << r.out;
  EXPECT_EQ(json::parse(r.out)["error"]["kind"], "hypothesis_violation");
}

TEST(RunCli, NonConvergenceExitsFour) {
  TempDir d;
  const CliResult r = cli(
      {"vi", "--config",
       d.write("n.json",
               R"({"tolerances":{"max_iters":1,"tol":1e-14},)"
               R"("problem":{"kind":"affine","A":[[1,0],[0,1]],"b":[2,0],"rho":1.0}})")});
  EXPECT_EQ(r.code, kNonConvergence) << r.out;
  EXPECT_EQ(json::parse(r.out)["error"]["kind"], "non_convergence");
}

TEST(RunCli, TamperedCertificateExitsThree) {
  TempDir d;
  const std::string cert = d.file("cert.json");
  ASSERT_EQ(cli({"vi", "--config", d.write("v.json", kAffineVi), "--out", cert}).code, kPass);
  EXPECT_EQ(cli({"verify", "--config", cert}).code, kPass);

  json doc = json::parse(read_file(cert));
  doc["solution"]["x_star"] = {0.0, 0.25};
  doc["solution"]["y_star"] = {0.0, 0.25};
  const CliResult r = cli({"verify", "--config", d.write("tampered.json", doc.dump())});
  EXPECT_EQ(r.code, kCheckFailure);
  const json out = json::parse(r.out);
  bool witnessed = false;
  for (const auto& c : out["checks"]) {
    if (!c["passed"].get<bool>()) witnessed = witnessed || c.contains("witness");
  }
  EXPECT_TRUE(witnessed);
  EXPECT_NE(r.err.find("FAIL"), std::string::npos) << r.err;
}

TEST(RunCli, MalformedCertificate) {
  TempDir d;
  EXPECT_EQ(cli({"verify", "--config", d.write("x.json", R"({"solution":{}})")}).code, kUsage);
}

TEST(RunCli, OutIsWrittenAtomically) {
  TempDir d;
  const std::string cert = d.file("cert.json");
  const CliResult r = cli({"vi", "--config", d.write("c.json", kConstantVi), "--out", cert});
  ASSERT_EQ(r.code, kPass);
  EXPECT_NE(r.out.find("theorem 2"), std::string::npos);
  EXPECT_NO_THROW(json::parse(read_file(cert)));
  for (const auto& e : fs::directory_iterator(d.path())) {
    EXPECT_EQ(e.path().filename().string().find(".tmp."), std::string::npos);
  }
}

TEST(WriteAtomically, ReplacesExisting) {
  TempDir d;
  const std::string p = d.write("f.txt", "old");
  write_atomically(p, "new");
  EXPECT_EQ(read_file(p), "new");
}

struct RoundTripCase {
  const char* name;
  const char* command;
  std::string config;
};

void PrintTo(const RoundTripCase& c, std::ostream* os) { *os << c.name; }

class RoundTrip : public ::testing::TestWithParam<RoundTripCase> {};

TEST_P(RoundTrip, RunThenVerify) {
  TempDir d;
  const RoundTripCase& c = GetParam();
  const std::string cert = d.file("cert.json");
  const CliResult r = cli({c.command, "--config", d.write("cfg.json", c.config), "--out", cert});
  ASSERT_EQ(r.code, kPass) << r.out << r.err;
  const CliResult v = cli({"verify", "--config", cert});
  EXPECT_EQ(v.code, kPass) << v.out;
}

INSTANTIATE_TEST_SUITE_P(
    AcceptanceProblems, RoundTrip,
    ::testing::Values(
        RoundTripCase{"constant_vi", "vi", kConstantVi},
        RoundTripCase{"affine_vi", "vi", kAffineVi},
        RoundTripCase{"shifted_psi", "vi-shifted", std::string("{") + kPsi + R"(,"w":[16,0]})"},
        RoundTripCase{"best_approx_constant", "best-approx",
                      R"({"problem":{"kind":"constant","c":[1,0],"rho":1.0}})"},
        RoundTripCase{"best_approx_shifted_identity", "best-approx",
                      R"({"problem":{"kind":"affine","A":[[1,0],[0,1]],"b":[2,0],"rho":1.0}})"},
        RoundTripCase{"prox_pair", "prox-pair",
                      R"({"problem":{"kind":"affine","A":[[1,0],[0,1]],"b":[2,0],"rho":1.0}})"},
        RoundTripCase{"small_radius_vi", "small-radius",
                      R"({"problem":{"kind":"affine","A":[[0.5,0],[0,0.5]],"b":[1,1],"rho":1.0}})"},
        RoundTripCase{"small_radius_ba", "small-radius",
                      R"({"mode":"ba","problem":{"kind":"affine","A":[[0.5,0],[0,0.5]],"b":[1,1],"rho":1.0}})"},
        RoundTripCase{"bilinear_saddle", "saddle",
                      R"({"problem":{"kind":"bilinear","B":[[1]],"rho":0.3},)"
                      R"("Y":{"kind":"box","lower":[1],"upper":[2]}})"},
        RoundTripCase{"constants", "constants",
                      R"({"problem":{"kind":"affine","A":[[1,0],[0,1]],"b":[2,0],"rho":1.0}})"}),
    [](const ::testing::TestParamInfo<RoundTripCase>& i) { return std::string(i.param.name); });

TEST(Determinism, IdenticalApartFromWallTime) {
  const RunConfig cfg = parse_config_text(kAffineVi);
  const Outcome a = run(cfg);
  const Outcome b = run(cfg);
  ASSERT_EQ(a.exit_code, kPass);
  EXPECT_EQ(strip_time(a.document).dump(), strip_time(b.document).dump());
}

TEST(Determinism, ThreadCountDoesNotChangeCertificate) {
  const RunConfig cfg = parse_config_text(
      R"({"command":"best-approx","problem":{"kind":"affine","A":[[1,0],[0,1]],"b":[2,0],"rho":1.0}})");
  ::setenv("BALLSADDLE_THREADS", "1", 1);
  EXPECT_EQ(worker_count(), 1u);
  const Outcome one = run(cfg);
  ::setenv("BALLSADDLE_THREADS", "3", 1);
  EXPECT_EQ(worker_count(), 3u);
  const Outcome three = run(cfg);
  ::unsetenv("BALLSADDLE_THREADS");
  EXPECT_EQ(strip_time(one.document).dump(), strip_time(three.document).dump());
}

TEST(Parallel, ThreadsEnvIgnoresGarbage) {
  ::setenv("BALLSADDLE_THREADS", "zero", 1);
  EXPECT_GE(worker_count(), 1u);
  ::setenv("BALLSADDLE_THREADS", "-2", 1);
  EXPECT_GE(worker_count(), 1u);
  ::unsetenv("BALLSADDLE_THREADS");
}

TEST(Binary, ExitCodesFromProcess) {
  TempDir d;
  const std::string bin = BALLSADDLE_BINARY;
  auto status = [&](const std::string& args) {
    const int s = std::system((bin + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  EXPECT_EQ(status("vi --config " + d.write("c.json", kConstantVi)), kPass);
  EXPECT_EQ(status("vi-shifted --config " +
                   d.write("s.json", std::string("{") + kPsi + R"(,"w":[15.9,0]})")),
            kHypothesisViolation);
  EXPECT_EQ(status("vi"), kUsage);
  EXPECT_EQ(status("vi --config " + d.write("t.json", kConstantVi) + " --out " +
                   d.file("o.json")),
            kPass);
  EXPECT_TRUE(fs::exists(d.file("o.json")));
}
