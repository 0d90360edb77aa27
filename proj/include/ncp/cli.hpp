#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ncp/circle.hpp"
#include "ncp/harness.hpp"
#include "ncp/serialize.hpp"

namespace ncp::cli {

enum ExitCode { kOk = 0, kDisagree = 1, kValidation = 2, kNumerical = 3 };

struct Scenario {
  std::string space = "real";
  ArraySpec array;
  CircleArraySpec circle;
  std::optional<LevyTriple> triple;
  std::optional<CircleGenerator> generator;
  std::vector<Operation> ops;
  double tolerance = 0.05;
  double flow_step = kDefaultFlowStep;
  bool correct_rotation = false;
  std::string output;
};

// Checks the scenario object field by field; unknown fields and bad values
// raise ValidationError naming the field.
Scenario parse_scenario(const json& j);
Scenario load_scenario(const std::string& path);

json limit_run(const Scenario& s);
// Report and whether all verdicts agree.
std::pair<json, bool> bp_check(const Scenario& s);
json circle_run(const Scenario& s);

// Entry point shared by the ncp executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ncp::cli
