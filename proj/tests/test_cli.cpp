#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "ncp/cli.hpp"
#include "ncp/errors.hpp"

namespace fs = std::filesystem;
using ncp::json;

namespace {

struct ToolRun {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / ("ncp_cli_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

ToolRun ncp_tool(const std::string& args) {
  const fs::path dir = scratch();
  const fs::path out = dir / "stdout", err = dir / "stderr";
  const std::string cmd = std::string("'") + NCP_TOOL_PATH + "' " + args + " >'" + out.string() +
                          "' 2>'" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

std::string scenario(const std::string& name) {
  return std::string("'") + NCP_SCENARIO_DIR + "/" + name + "'";
}

fs::path write_scenario(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << text;
  return p;
}

std::string verdict(const json& report, const std::string& op) {
  for (const auto& o : report.at("operations"))
    if (o.at("op") == op) return o.at("verdict");
  return "missing";
}

}  // namespace

TEST(CliIdiv, BooleanSemicircleTripleGivesTwoAtoms) {
  const ToolRun r = ncp_tool("idiv --m 1 --gamma 0 --sigma 0:1 --op boolean");
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  ASSERT_EQ(j.at("atoms").size(), 2u);
  EXPECT_NEAR(j["atoms"][0]["position"].get<double>(), -1.0, 1e-12);
  EXPECT_NEAR(j["atoms"][0]["weight"].get<double>(), 0.5, 1e-12);
  EXPECT_NEAR(j["atoms"][1]["position"].get<double>(), 1.0, 1e-12);
  EXPECT_NEAR(j["atoms"][1]["weight"].get<double>(), 0.5, 1e-12);
  EXPECT_TRUE(j.contains("engine"));
  EXPECT_EQ(j["engine"]["grid_eps"].get<double>(), 1e-3);
}

TEST(CliIdiv, EmptySigmaIsPureDrift) {
  const ToolRun r = ncp_tool("idiv --sigma '' --gamma 2 --op boolean");
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  ASSERT_EQ(j.at("atoms").size(), 1u);
  EXPECT_NEAR(j["atoms"][0]["position"].get<double>(), 2.0, 1e-12);
  EXPECT_NEAR(j["atoms"][0]["weight"].get<double>(), 1.0, 1e-12);
}

TEST(CliIdiv, MonotoneDensityIsArcsine) {
  const ToolRun r = ncp_tool("--format csv idiv --sigma 0:1 --op monotone --x-min -2 --x-max 2 --bins 401");
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  bool header = false;
  int checked = 0;
  while (std::getline(in, line)) {
    if (line.rfind("#", 0) == 0) {
      EXPECT_FALSE(header) << "provenance lines precede the table";
      continue;
    }
    if (line == "x,density") {
      header = true;
      continue;
    }
    const auto comma = line.find(',');
    const double x = std::stod(line.substr(0, comma));
    const double d = std::stod(line.substr(comma + 1));
    if (std::abs(x) <= 1.2) {
      const double exact = 1.0 / (std::numbers::pi * std::sqrt(2.0 - x * x));
      EXPECT_NEAR(d, exact, 0.01 * exact) << "x = " << x;
      ++checked;
    } else if (std::abs(x) >= 1.6) {
      EXPECT_LT(d, 2e-3) << "x = " << x;
    }
  }
  EXPECT_TRUE(header);
  EXPECT_GT(checked, 200);
  EXPECT_NE(r.out.find("# grid_eps="), std::string::npos);
  EXPECT_NE(r.out.find("# flow_step="), std::string::npos);
}

TEST(CliIdiv, SvgAndOutputFiles) {
  const fs::path dir = scratch();
  const fs::path svg = dir / "density.svg", out = dir / "density.csv";
  fs::remove(svg);
  fs::remove(out);
  const ToolRun r = ncp_tool("--format csv --svg '" + svg.string() + "' --output '" + out.string() +
                         "' idiv --sigma 0:1 --op free");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  const std::string plot = slurp(svg);
  EXPECT_EQ(plot.rfind("<svg", 0), 0u);
  EXPECT_EQ(std::count(plot.begin(), plot.end(), '<') - 2, 1) << "single polyline";
  EXPECT_NE(plot.find("<polyline"), std::string::npos);
  EXPECT_NE(slurp(out).find("x,density"), std::string::npos);
}

TEST(CliIdiv, ClassicalGaussianDensity) {
  const ToolRun r = ncp_tool("idiv --sigma 0:1 --op classical --x-min -1 --x-max 1");
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  ASSERT_FALSE(j.at("density").empty());
  for (const auto& s : j["density"]) {
    const double x = s[0], d = s[1];
    EXPECT_NEAR(d, std::exp(-x * x / 2) / std::sqrt(2 * std::numbers::pi), 1e-4);
  }
}

TEST(CliValidation, UnknownOperationExitsTwo) {
  const ToolRun r = ncp_tool("idiv --sigma 0:1 --op cubic");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("cubic"), std::string::npos);
}

TEST(CliValidation, BadMassExitsTwo) {
  EXPECT_EQ(ncp_tool("idiv --m 1.5 --sigma 0:1 --op boolean").code, 2);
  EXPECT_EQ(ncp_tool("idiv --sigma 0:-1 --op boolean").code, 2);
  EXPECT_EQ(ncp_tool("idiv --sigma 0 --op boolean").code, 2);
}

TEST(CliValidation, FlowStepRange) {
  const ToolRun r = ncp_tool("--flow-step 0.5 flow --sigma 0:1");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("flow-step"), std::string::npos);
  EXPECT_EQ(ncp_tool("--flow-step 0 flow --sigma 0:1").code, 2);
}

TEST(CliValidation, FormatMustBeKnown) { EXPECT_EQ(ncp_tool("--format xml flow").code, 2); }

TEST(CliValidation, MissingSubcommand) { EXPECT_EQ(ncp_tool("").code, 2); }

TEST(CliValidation, NonIncreasingNValuesNamed) {
  const ToolRun r = ncp_tool("bp-check " + scenario("bad_n_values.json"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("array.n_values"), std::string::npos) << r.err;
}

TEST(CliValidation, UnknownFieldsNamed) {
  const fs::path top = write_scenario("top.json", R"({"array": {"family": "bernoulli_clt"}, "colour": 1})");
  ToolRun r = ncp_tool("bp-check '" + top.string() + "'");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("colour: unknown field"), std::string::npos) << r.err;

  const fs::path nested = write_scenario("nested.json", R"({"array": {"family": "bernoulli_clt", "size": 3}})");
  r = ncp_tool("limit-run '" + nested.string() + "'");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("array.size: unknown field"), std::string::npos) << r.err;
}

TEST(CliValidation, MalformedJsonAndMissingFile) {
  const fs::path bad = write_scenario("bad.json", "{\"array\": ");
  EXPECT_EQ(ncp_tool("limit-run '" + bad.string() + "'").code, 2);
  EXPECT_EQ(ncp_tool("limit-run /nonexistent/scenario.json").code, 2);
}

TEST(CliValidation, SpaceMismatch) {
  EXPECT_EQ(ncp_tool("circle-run " + scenario("bernoulli_clt.json")).code, 2);
  EXPECT_EQ(ncp_tool("bp-check " + scenario("circle_flow.json")).code, 2);
}

TEST(CliNumerical, DegreeCapExitsThree) {
  std::string mu;
  for (int i = 0; i < 32; ++i) mu += (i ? "," : "") + std::to_string(i) + ":0.03125";
  const ToolRun r = ncp_tool("convolve --mu " + mu + " --nu " + mu + " --op monotone");
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("numerical failure"), std::string::npos);
}

TEST(CliConvolve, BooleanOfBernoullis) {
  const ToolRun r = ncp_tool("convolve --mu=-1:0.5,1:0.5 --nu=-1:0.5,1:0.5 --op boolean");
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  // E = 2/z: atoms at +-sqrt 2 with weight 1/2
  ASSERT_EQ(j["atoms"].size(), 2u);
  for (const auto& a : j["atoms"]) {
    EXPECT_NEAR(std::abs(a["position"].get<double>()), std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(a["weight"].get<double>(), 0.5, 1e-12);
  }
}

TEST(CliConvolve, ClassicalCsvAtoms) {
  const ToolRun r = ncp_tool("--format csv convolve --mu 0:0.5,1:0.5 --nu 0:0.5,1:0.5 --op classical");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("position,weight\n0,0.25\n1,0.5\n2,0.25\n"), std::string::npos) << r.out;
}

TEST(CliConvolve, FreeEmbedsGridsAndDensity) {
  const ToolRun r = ncp_tool("convolve --mu=-1:0.5,1:0.5 --nu=-1:0.5,1:0.5 --op free");
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_TRUE(j.contains("grids"));
  EXPECT_FALSE(j["F_values"].empty());
  // arcsine law on (-2, 2)
  for (const auto& s : j["density"]) {
    const double x = s[0], d = s[1];
    if (std::abs(x) < 1.5)
      EXPECT_NEAR(d, 1.0 / (std::numbers::pi * std::sqrt(4.0 - x * x)), 0.01);
  }
}

TEST(CliFlow, CsvTrace) {
  const ToolRun r = ncp_tool("--format csv flow --sigma 0:1 --t-end 1");
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,re_z,im_z,re_F,im_F");
  double worst = 0.0;
  int at_end = 0;
  while (std::getline(in, line)) {
    double v[5];
    std::istringstream row(line);
    for (double& x : v) {
      std::string cell;
      std::getline(row, cell, ',');
      x = std::stod(cell);
    }
    if (v[0] == 1.0) {
      const ncp::cplx z(v[1], v[2]);
      ncp::cplx s = std::sqrt(z * z - 2.0);
      if (s.imag() < 0) s = -s;
      worst = std::max(worst, std::abs(ncp::cplx(v[3], v[4]) - s));
      ++at_end;
    }
  }
  EXPECT_GT(at_end, 0);
  EXPECT_LE(worst, 1e-6);
}

TEST(CliFlow, JsonTraceHasEngine) {
  const ToolRun r = ncp_tool("flow --sigma 0:1 --t-end 0.5");
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["command"], "flow");
  EXPECT_FALSE(j["maps"].empty());
  EXPECT_DOUBLE_EQ(j["maps"].back()["t"].get<double>(), 0.5);
}

TEST(CliBpCheck, BernoulliAllConverge) {
  const ToolRun r = ncp_tool("bp-check " + scenario("bernoulli_clt.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_TRUE(j["verdicts_agree"].get<bool>());
  for (const char* op : {"classical", "free", "boolean", "monotone"})
    EXPECT_EQ(verdict(j, op), "converged") << op;
  EXPECT_TRUE(j["grids"].contains("Z_R"));
  EXPECT_TRUE(j["grids"].contains("t_grid"));
  EXPECT_EQ(j["operations"][0]["distances"].size(), 5u);
}

TEST(CliBpCheck, DisagreementExitsOne) {
  // classical cf-distance at n = 256 is about 7e-4, boolean is exact
  const ToolRun r = ncp_tool("--tolerance 1e-4 bp-check " + scenario("bernoulli_clt.json"));
  EXPECT_EQ(r.code, 1) << r.err;
  const json j = json::parse(r.out);
  EXPECT_FALSE(j["verdicts_agree"].get<bool>());
  EXPECT_EQ(verdict(j, "boolean"), "converged");
  EXPECT_EQ(verdict(j, "classical"), "not converged");
}

TEST(CliBpCheck, SubprobabilityPairs) {
  ToolRun r = ncp_tool("bp-check " + scenario("damped.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  json j = json::parse(r.out);
  EXPECT_EQ(verdict(j, "boolean"), "converged");
  EXPECT_EQ(verdict(j, "monotone"), "converged");

  r = ncp_tool("bp-check " + scenario("drift.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  j = json::parse(r.out);
  EXPECT_EQ(verdict(j, "boolean"), "not converged");
  EXPECT_EQ(verdict(j, "monotone"), "not converged");
}

TEST(CliBpCheck, NonInfinitesimalAllFail) {
  const ToolRun r = ncp_tool("bp-check " + scenario("non_infinitesimal.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  for (const char* op : {"classical", "free", "boolean", "monotone"})
    EXPECT_EQ(verdict(j, op), "not converged") << op;
}

TEST(CliBpCheck, ByteIdenticalRepeats) {
  const ToolRun a = ncp_tool("bp-check " + scenario("damped.json"));
  const ToolRun b = ncp_tool("bp-check " + scenario("damped.json"));
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
}

TEST(CliLimitRun, ReportSections) {
  const ToolRun r = ncp_tool("limit-run " + scenario("bernoulli_clt.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["limit_source"], "scenario");
  EXPECT_EQ(j["condition_e"].size(), 5u);
  EXPECT_EQ(j["chernoff_residual"].size(), 5u);
  EXPECT_EQ(j["operations"].size(), 4u);
  EXPECT_FALSE(j["tightness"].empty());
  EXPECT_EQ(j, json::parse(ncp_tool("limit-run " + scenario("bernoulli_clt.json")).out));
}

TEST(CliLimitRun, OutputFromScenarioAndFlag) {
  const fs::path out = scratch() / "report.json";
  fs::remove(out);
  const ToolRun r = ncp_tool("--output '" + out.string() + "' limit-run " + scenario("damped.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(json::parse(slurp(out))["command"], "limit-run");
}

TEST(CliLimitRun, SubprobabilityRejectsClassicalOps) {
  const fs::path p = write_scenario(
      "ops.json", R"({"array": {"family": "damped"}, "ops": ["classical"]})");
  const ToolRun r = ncp_tool("limit-run '" + p.string() + "'");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("ops"), std::string::npos);
}

TEST(CliCircleRun, RotatedWithoutCorrection) {
  const fs::path p = write_scenario("rot.json", R"({
    "space": "circle",
    "array": {"family": "rotated_flow", "rotation": 1},
    "triple": {"beta": -2.5, "sigma": [[0, 0.8]]}
  })");
  const ToolRun r = ncp_tool("circle-run '" + p.string() + "'");
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(verdict(j, "boolean"), "converged");
  EXPECT_EQ(verdict(j, "monotone"), "not converged");
  EXPECT_FALSE(j["findings"].empty());
  EXPECT_FALSE(j.contains("rotation"));
  EXPECT_TRUE(j["grids"].contains("disk"));
}

TEST(CliCircleRun, RotationCorrection) {
  const ToolRun r = ncp_tool("circle-run " + scenario("circle_rotated.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  for (const auto& l : j["rotation"]["ell"]) EXPECT_EQ(l.get<int>(), -1);
  EXPECT_EQ(j["rotation"]["corrected"]["verdict"], "converged");
  EXPECT_EQ(j["rotation"]["uncorrected"]["verdict"], "not converged");
}

TEST(CliCircleRun, FlowArrayAgrees) {
  const ToolRun r = ncp_tool("circle-run " + scenario("circle_flow.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_TRUE(j["verdicts_agree"].get<bool>());
  EXPECT_TRUE(j["beta_condition"]["holds"].get<bool>());
  EXPECT_TRUE(j["findings"].empty());
}

TEST(CliScenario, DefaultsAndOverrides) {
  const ncp::cli::Scenario s = ncp::cli::parse_scenario(json::parse(R"({"array": {"family": "bernoulli_clt"}})"));
  EXPECT_EQ(s.space, "real");
  EXPECT_DOUBLE_EQ(s.tolerance, 0.05);
  EXPECT_DOUBLE_EQ(s.flow_step, 1e-3);
  EXPECT_EQ(s.array.n_values, (std::vector<int>{16, 32, 64, 128, 256}));
  EXPECT_FALSE(s.triple.has_value());
}

TEST(CliScenario, CircleNeedsTriple) {
  EXPECT_THROW(ncp::cli::parse_scenario(json::parse(R"({"space": "circle", "array": {"family": "flow"}})")),
               ncp::ValidationError);
  EXPECT_THROW(ncp::cli::parse_scenario(json::parse(R"({"space": "torus", "array": {}})")),
               ncp::ValidationError);
}

TEST(CliScenario, ShippedScenariosParse) {
  for (const auto& entry : fs::directory_iterator(NCP_SCENARIO_DIR)) {
    if (entry.path().filename() == "bad_n_values.json") {
      EXPECT_THROW(ncp::cli::load_scenario(entry.path().string()), ncp::ValidationError);
    } else {
      EXPECT_NO_THROW(ncp::cli::load_scenario(entry.path().string())) << entry.path();
    }
  }
}
