#include "ncp/serialize.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "ncp/errors.hpp"

namespace ncp {
namespace {

double number_from(const json& v, const std::string& field) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec == std::errc() && ptr == s.data() + s.size()) return x;
  }
  throw ValidationError(field + ": expected a number");
}

template <typename AtomT>
std::vector<AtomT> pairs_from(const json& j, const std::string& field) {
  if (!j.is_array()) throw ValidationError(field + ": expected an array of [position, weight]");
  std::vector<AtomT> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string f = field + "[" + std::to_string(i) + "]";
    if (!j[i].is_array() || j[i].size() != 2)
      throw ValidationError(f + ": expected [position, weight]");
    out.push_back({number_from(j[i][0], f), number_from(j[i][1], f)});
  }
  return out;
}

json complex_pair(cplx z) { return json::array({z.real(), z.imag()}); }

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

json to_json(const FiniteAtomicMeasure& mu) {
  json out = json::array();
  for (const auto& a : mu.atoms()) out.push_back({a.position, a.weight});
  return out;
}

FiniteAtomicMeasure measure_from_json(const json& j, Role role, const std::string& field) {
  auto atoms = pairs_from<Atom>(j, field);
  try {
    return FiniteAtomicMeasure(std::move(atoms), role);
  } catch (const ValidationError& e) {
    throw ValidationError(field + ": " + e.what());
  }
}

json to_json(const CircleMeasure& mu) {
  json out = json::array();
  for (const auto& a : mu.atoms()) out.push_back({a.angle, a.weight});
  return out;
}

CircleMeasure circle_measure_from_json(const json& j, Role role, const std::string& field) {
  auto atoms = pairs_from<CircleAtom>(j, field);
  try {
    return CircleMeasure(std::move(atoms), role);
  } catch (const ValidationError& e) {
    throw ValidationError(field + ": " + e.what());
  }
}

FiniteAtomicMeasure parse_atoms(const std::string& text, Role role) {
  std::vector<Atom> atoms;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos)
      throw ValidationError("atom '" + item + "': expected position:weight");
    const json pos = item.substr(0, colon), w = item.substr(colon + 1);
    atoms.push_back({number_from(pos, "atom position"), number_from(w, "atom weight")});
  }
  if (atoms.empty() && role == Role::state) throw ValidationError("empty state measure");
  return FiniteAtomicMeasure(std::move(atoms), role);
}

json atoms_json(const std::vector<Atom>& atoms) {
  json out = json::array();
  for (const auto& a : atoms) out.push_back({{"position", a.position}, {"weight", a.weight}});
  return out;
}

json points_json(const ComplexVector& z) {
  json out = json::array();
  for (Eigen::Index i = 0; i < z.size(); ++i) out.push_back(complex_pair(z[i]));
  return out;
}

json to_json(const TransformGrid& g) {
  const char* kind = g.kind == TransformKind::G ? "G" : g.kind == TransformKind::F ? "F" : "E";
  return {{"kind", kind},
          {"mass", g.mass},
          {"points", points_json(g.points)},
          {"values", points_json(g.values)}};
}

json to_json(const DiskGrid& g) {
  json out = json::array();
  for (Eigen::Index i = 0; i < g.points.size(); ++i)
    out.push_back({g.points[i].real(), g.points[i].imag(), g.values[i].real(),
                   g.values[i].imag()});
  return out;
}

json to_json(const LevyTriple& T) {
  return {{"m", T.m}, {"gamma", T.gamma}, {"sigma", to_json(T.sigma)}};
}

json to_json(const ConditionE& ce) {
  return {{"n", ce.n},
          {"k", ce.k},
          {"gamma", ce.gamma},
          {"sigma", to_json(ce.sigma)},
          {"mass_power", ce.mass_power}};
}

json to_json(const OperationReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"n", row.n}, {"k", row.k}, {"distance", row.distance}});
  json out = {{"op", to_string(r.op)},
              {"distances", rows},
              {"tail", r.tail},
              {"verdict", r.converged ? "converged" : "not converged"}};
  if (!r.error.empty()) out["error"] = r.error;
  return out;
}

json to_json(const ConvergenceReport& r) {
  json cond = json::array();
  for (const auto& c : r.condition) cond.push_back(to_json(c));
  json ops = json::array();
  for (const auto& o : r.ops) ops.push_back(to_json(o));
  return {{"limit", to_json(r.limit)},
          {"condition_e", cond},
          {"sigma_distance", r.sigma_distance},
          {"operations", ops},
          {"verdicts_agree", r.verdicts_agree}};
}

std::string density_csv(const std::vector<DensitySample>& d) {
  std::string out = "x,density\n";
  for (const auto& s : d) out += fmt(s.x) + "," + fmt(s.density) + "\n";
  return out;
}

std::string density_svg(const std::vector<DensitySample>& d, int width, int height) {
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
     << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  if (!d.empty()) {
    const double x0 = d.front().x, x1 = d.back().x;
    double ymax = 0.0;
    for (const auto& s : d)
      if (std::isfinite(s.density)) ymax = std::max(ymax, s.density);
    if (ymax <= 0.0) ymax = 1.0;
    const double pad = 10.0;
    os << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1\" points=\"";
    for (const auto& s : d) {
      const double px = pad + (width - 2 * pad) * (x1 > x0 ? (s.x - x0) / (x1 - x0) : 0.5);
      const double v = std::isfinite(s.density) ? std::clamp(s.density, 0.0, ymax) : 0.0;
      const double py = height - pad - (height - 2 * pad) * v / ymax;
      os << fmt(px) << "," << fmt(py) << " ";
    }
    os << "\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace ncp
