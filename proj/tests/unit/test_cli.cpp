#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run dexp_run(std::vector<std::string> args, const std::string& input = "") {
  std::ostringstream out, err;
  std::istringstream in(input);
  const int code = dexp::cli::run(args, out, err, in);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("dexp_cli_" + name);
  fs::remove_all(p);
  return p;
}

const std::vector<std::string> kCase1{"--gamma", "3", "--beta", "0.1", "--tau0", "0.01", "--taueps", "0.01",
                                      "--tauS", "50"};

std::vector<std::string> with(std::vector<std::string> head, const std::vector<std::string>& tail) {
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

TEST(Solve, TableHasEveryField) {
  auto r = dexp_run(with({"solve"}, with(kCase1, {"--theta", "0"})));
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* key : {"a ", "alpha", "tau", "A ", "B ", "C ", "wl_total", "wl_bayes", "wl_diag"}) {
    EXPECT_NE(r.out.find(key), std::string::npos) << key;
  }
  EXPECT_NE(r.out.find("0.1216547640345"), std::string::npos);
}

TEST(Solve, ThetaMinusOneIsAUsageError) {
  auto r = dexp_run({"solve", "--theta=-1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("theta must exceed -1"), std::string::npos);
  EXPECT_TRUE(r.out.empty());
}

TEST(Solve, JsonRoundTrip) {
  auto first = dexp_run(with({"solve", "--json", "--theta", "0.3", "--delta", "0.2", "--regime", "informed"}, kCase1));
  ASSERT_EQ(first.code, 0) << first.err;
  auto second = dexp_run({"solve", "--json", "--from-json", "-"}, first.out);
  ASSERT_EQ(second.code, 0) << second.err;
  EXPECT_EQ(first.out, second.out);
  auto j = json::parse(first.out);
  EXPECT_EQ(j["regime"], "informed");
  EXPECT_TRUE(j["welfare"]["wl_bayes"].is_null());
}

TEST(Solve, FlagsOverrideJsonInput) {
  auto first = dexp_run({"solve", "--json", "--theta", "0.3"});
  auto second = dexp_run({"solve", "--json", "--from-json", "-", "--theta", "0.1"}, first.out);
  ASSERT_EQ(second.code, 0);
  EXPECT_EQ(json::parse(second.out)["theta"].get<double>(), 0.1);
}

TEST(Solve, MalformedJsonInput) {
  auto r = dexp_run({"solve", "--from-json", "-"}, "{not json");
  EXPECT_EQ(r.code, 2);
}

TEST(Config, FlatFileWithFlagOverride) {
  auto dir = scratch("config");
  fs::create_directories(dir);
  const auto path = dir / "economy.cfg";
  std::ofstream(path) << "# case 2\ngamma = 3\nbeta=2\ntau0=1\ntaueps=5\ntauS=1\ntheta=0.4\n\nregime=informed\n";
  auto r = dexp_run({"solve", "--json", "--config", path.string(), "--theta", "0.2"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = json::parse(r.out);
  EXPECT_EQ(j["params"]["beta"].get<double>(), 2.0);
  EXPECT_EQ(j["params"]["taueps"].get<double>(), 5.0);
  EXPECT_EQ(j["theta"].get<double>(), 0.2);
  EXPECT_EQ(j["regime"], "informed");
}

TEST(Config, UnknownKeyAndBadValue) {
  auto dir = scratch("config_bad");
  fs::create_directories(dir);
  std::ofstream(dir / "a.cfg") << "gama=3\n";
  std::ofstream(dir / "b.cfg") << "gamma=three\n";
  std::ofstream(dir / "c.cfg") << "gamma\n";
  for (const char* f : {"a.cfg", "b.cfg", "c.cfg"}) {
    auto r = dexp_run({"solve", "--config", (dir / f).string()});
    EXPECT_EQ(r.code, 2) << f;
  }
  EXPECT_EQ(dexp_run({"solve", "--config", (dir / "missing.cfg").string()}).code, 2);
}

TEST(Usage, ExitCodes) {
  EXPECT_EQ(dexp_run({"--help"}).code, 0);
  EXPECT_EQ(dexp_run({}).code, 2);
  EXPECT_EQ(dexp_run({"frobnicate"}).code, 2);
  EXPECT_EQ(dexp_run({"solve", "--gamma", "abc"}).code, 2);
  EXPECT_EQ(dexp_run({"solve", "--regime", "suppliers"}).code, 2);
  EXPECT_EQ(dexp_run({"solve", "--beta", "-1"}).code, 2);
  EXPECT_EQ(dexp_run({"solve", "--delta", "-1.5"}).code, 2);
}

TEST(Figure, Fig1aFivePointsKeepsSchema) {
  auto dir = scratch("fig1a");
  auto r = dexp_run({"figure", "fig1a", "--points", "5", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string text = slurp(dir / "fig1a.csv");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 6);
  const std::string header = text.substr(0, text.find('\n'));
  for (const char* col : {"axis_value", "wl_total", "wl_bayes", "wl_market_theta0", "wl_team"}) {
    EXPECT_NE(header.find(col), std::string::npos) << col;
  }
  EXPECT_EQ(text.find('\r'), std::string::npos);
  auto m = json::parse(slurp(dir / "fig1a.manifest.json"));
  EXPECT_EQ(m["options"]["command"], "figure");
  EXPECT_EQ(m["outputs"][0], "fig1a.csv");
  EXPECT_EQ(m["options"]["params"]["muS"].get<double>(), 0.0);
}

TEST(Figure, DefaultResolutionAndFig3) {
  auto dir = scratch("fig3");
  ASSERT_EQ(dexp_run({"figure", "fig1b", "--out", dir.string()}).code, 0);
  const std::string t1 = slurp(dir / "fig1b.csv");
  EXPECT_EQ(std::count(t1.begin(), t1.end(), '\n'), 201);
  ASSERT_EQ(dexp_run({"figure", "fig3", "--points", "4", "--out", dir.string()}).code, 0);
  const std::string t3 = slurp(dir / "fig3.csv");
  EXPECT_EQ(t3.substr(0, t3.find('\n')), "theta,delta_opt_case1,wl_case1,flag_case1,delta_opt_case2,wl_case2,flag_case2");
}

TEST(Figure, UnknownPresetIsAUsageError) {
  EXPECT_EQ(dexp_run({"figure", "fig2", "--out", scratch("fig2").string()}).code, 2);
}

TEST(Replay, FigureReproducesBytes) {
  auto a = scratch("replay_a");
  auto b = scratch("replay_b");
  ASSERT_EQ(dexp_run({"figure", "fig1b", "--points", "9", "--out", a.string()}).code, 0);
  auto r = dexp_run({"replay", (a / "fig1b.manifest.json").string(), "--out", b.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(a / "fig1b.csv"), slurp(b / "fig1b.csv"));
}

TEST(Replay, SimulationReproducesBytes) {
  auto a = scratch("replay_sim_a");
  auto b = scratch("replay_sim_b");
  ASSERT_EQ(dexp_run({"simulate", "--theta", "0.3", "--delta", "0.1", "--reps", "2000", "--agents", "300",
                      "--seed", "9", "--out", a.string()})
                .code,
            0);
  ASSERT_EQ(dexp_run({"replay", (a / "simulate.manifest.json").string(), "--out", b.string()}).code, 0);
  EXPECT_EQ(slurp(a / "simulate.csv"), slurp(b / "simulate.csv"));
  EXPECT_EQ(slurp(a / "simulate.json"), slurp(b / "simulate.json"));
  // in place: outputs are rewritten next to the manifest
  ASSERT_EQ(dexp_run({"replay", (b / "simulate.manifest.json").string()}).code, 0);
  EXPECT_EQ(slurp(a / "simulate.csv"), slurp(b / "simulate.csv"));
}

TEST(Sweep, StdoutCsvAndDeltaAxis) {
  auto r = dexp_run({"sweep", "--points", "3", "--lo", "0", "--hi", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')),
            "axis_value,a,alpha,eta,eta_p,tau,A,B,C,var_p,wl_total,wl_bayes,wl_diag,dwl_daxis,flag");
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 4);
  auto d = dexp_run({"sweep", "--axis", "delta", "--points", "5", "--regime", "informed"});
  ASSERT_EQ(d.code, 0) << d.err;
  EXPECT_EQ(std::count(d.out.begin(), d.out.end(), '\n'), 6);
  EXPECT_EQ(dexp_run({"sweep", "--lo", "1"}).code, 2);
  EXPECT_EQ(dexp_run({"sweep", "--lo", "1", "--hi", "0"}).code, 2);
}

TEST(Threshold, CaseTwoJson) {
  auto r = dexp_run({"threshold", "--json", "--gamma", "3", "--beta", "2", "--tau0", "1", "--taueps", "5", "--tauS",
                     "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = json::parse(r.out);
  EXPECT_NEAR(j["theta_prime"].get<double>(), -0.098792, 1e-5);
  EXPECT_EQ(j["balance"], "PecuniaryDominates");
  EXPECT_GT(j["delta_star"].get<double>(), 0.0);
}

TEST(Threshold, InfeasibleDeltaStarIsReportedNotFatal) {
  auto r = dexp_run(with({"threshold", "--json", "--theta", "-0.5"}, kCase1));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(json::parse(r.out)["delta_star"].is_null());
}

TEST(Optimize, CaseOne) {
  auto r = dexp_run(with({"optimize", "--json"}, kCase1));
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = json::parse(r.out);
  EXPECT_NEAR(j["theta_opt"]["theta"].get<double>(), 0.0877, 2e-3);
  EXPECT_FALSE(j["theta_opt"]["at_boundary"].get<bool>());
}

TEST(Simulate, SummaryAndConfigValidation) {
  auto r = dexp_run({"simulate", "--json", "--reps", "4000", "--agents", "500"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = json::parse(r.out);
  EXPECT_EQ(j["checks"].size(), 6u);
  EXPECT_EQ(dexp_run({"simulate", "--reps", "10"}).code, 2);
  EXPECT_EQ(dexp_run({"simulate", "--reps", "1001", "--antithetic"}).code, 2);
}

TEST(Verify, QuickPasses) {
  auto dir = scratch("verify");
  auto r = dexp_run({"verify", "--quick", "--draws", "5", "--out", dir.string()});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("PASS"), std::string::npos);
  auto j = json::parse(slurp(dir / "verify.json"));
  EXPECT_EQ(j["results"].size(), 5u);
  EXPECT_TRUE(j["pass"].get<bool>());
}

}  // namespace
