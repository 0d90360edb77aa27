#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ncp/circle.hpp"
#include "ncp/harness.hpp"
#include "ncp/measure.hpp"
#include "ncp/transforms.hpp"

namespace ncp {

using json = nlohmann::json;

// [[position, weight], ...]; numbers or decimal strings on input.
json to_json(const FiniteAtomicMeasure& mu);
FiniteAtomicMeasure measure_from_json(const json& j, Role role = Role::state,
                                      const std::string& field = "measure");

// [[angle, weight], ...]
json to_json(const CircleMeasure& mu);
CircleMeasure circle_measure_from_json(const json& j, Role role = Role::state,
                                       const std::string& field = "measure");

// "pos:weight,pos:weight"; the empty string is the zero measure.
FiniteAtomicMeasure parse_atoms(const std::string& text, Role role);

// [{"position": x, "weight": w}, ...]
json atoms_json(const std::vector<Atom>& atoms);

json points_json(const ComplexVector& z);
json to_json(const TransformGrid& g);
// [[re z, im z, re eta, im eta], ...]
json to_json(const DiskGrid& g);

json to_json(const LevyTriple& T);
json to_json(const ConditionE& ce);
json to_json(const OperationReport& r);
json to_json(const ConvergenceReport& r);

// "x,density" header then one row per sample.
std::string density_csv(const std::vector<DensitySample>& d);

// Single-polyline SVG of a density.
std::string density_svg(const std::vector<DensitySample>& d, int width = 640, int height = 360);

}  // namespace ncp
