#include "ncp/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ncp/convolutions.hpp"
#include "ncp/errors.hpp"
#include "ncp/idiv.hpp"

namespace ncp::cli {
namespace {

void allow_only(const json& j, const std::string& where, std::set<std::string> keys) {
  if (!j.is_object()) throw ValidationError(where + ": expected an object");
  for (const auto& [key, value] : j.items())
    if (!keys.count(key))
      throw ValidationError((where.empty() ? "" : where + ".") + key + ": unknown field");
}

double get_number(const json& j, const std::string& key, const std::string& where,
                  double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw ValidationError(where + key + ": expected a number");
  return j.at(key).get<double>();
}

std::vector<int> get_ints(const json& j, const std::string& field) {
  if (!j.is_array()) throw ValidationError(field + ": expected an array of integers");
  std::vector<int> out;
  for (const auto& v : j) {
    if (!v.is_number_integer()) throw ValidationError(field + ": expected integers");
    out.push_back(v.get<int>());
  }
  return out;
}

template <typename Spec>
void prefix_validate(const Spec& spec) {
  try {
    spec.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("array.") + e.what());
  }
}

ArraySpec parse_real_array(const json& a) {
  allow_only(a, "array", {"family", "lambda", "c", "base", "rows", "n_values", "k_values"});
  ArraySpec spec;
  if (!a.contains("family") || !a.at("family").is_string())
    throw ValidationError("array.family: required string");
  try {
    spec.family = parse_family(a.at("family").get<std::string>());
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("array.family: ") + e.what());
  }
  spec.lambda = get_number(a, "lambda", "array.", 1.0);
  spec.c = get_number(a, "c", "array.", 1.0);
  if (a.contains("base")) spec.base = measure_from_json(a.at("base"), Role::state, "array.base");
  if (a.contains("rows")) {
    if (!a.at("rows").is_array()) throw ValidationError("array.rows: expected an array");
    for (std::size_t i = 0; i < a.at("rows").size(); ++i)
      spec.rows.push_back(measure_from_json(a.at("rows")[i], Role::state,
                                            "array.rows[" + std::to_string(i) + "]"));
  }
  if (a.contains("n_values")) spec.n_values = get_ints(a.at("n_values"), "array.n_values");
  if (a.contains("k_values")) spec.k_values = get_ints(a.at("k_values"), "array.k_values");
  prefix_validate(spec);
  return spec;
}

CircleArraySpec parse_circle_array(const json& a) {
  allow_only(a, "array", {"family", "rotation", "n_values", "k_values"});
  CircleArraySpec spec;
  if (!a.contains("family") || !a.at("family").is_string())
    throw ValidationError("array.family: required string");
  try {
    spec.family = parse_circle_family(a.at("family").get<std::string>());
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("array.family: ") + e.what());
  }
  if (a.contains("rotation")) {
    if (!a.at("rotation").is_number_integer())
      throw ValidationError("array.rotation: expected an integer");
    spec.rotation = a.at("rotation").get<int>();
  }
  if (a.contains("n_values")) spec.n_values = get_ints(a.at("n_values"), "array.n_values");
  if (a.contains("k_values")) spec.k_values = get_ints(a.at("k_values"), "array.k_values");
  return spec;
}

json engine_header(double grid_eps, double flow_step, double tolerance) {
  return {{"grid_eps", grid_eps},
          {"flow_step", flow_step},
          {"tolerance", tolerance},
          {"fft_samples", FftOptions{}.samples},
          {"fft_t_max", FftOptions{}.t_max},
          {"atom_threshold", kAtomThreshold},
          {"atom_stability", kAtomStability}};
}

json real_grids() {
  return {{"Z_R", points_json(canonical_grid())}, {"t_grid", cf_t_grid()}};
}

bool probability_rows(const ArraySpec& spec) {
  for (int n : spec.n_values)
    if (std::abs(mass(spec.row(n)) - 1.0) > 1e-12) return false;
  return true;
}

std::vector<DensitySample> clip(const std::vector<DensitySample>& d, Interval w) {
  std::vector<DensitySample> out;
  for (const auto& s : d)
    if (s.x >= w.lo && s.x <= w.hi) out.push_back(s);
  return out;
}

struct Globals {
  double grid_eps = 1e-3;
  double flow_step = kDefaultFlowStep;
  double tolerance = 0.05;
  std::string output;
  std::string format = "json";
  std::string svg;
  bool flow_step_set = false;
  bool tolerance_set = false;
};

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw ValidationError("output: cannot open '" + path + "'");
  f << text;
}

std::string density_text(const json& header, const std::vector<DensitySample>& d) {
  std::string text;
  for (const auto& [k, v] : header.items()) text += "# " + k + "=" + v.dump() + "\n";
  return text + density_csv(d);
}

json density_json(const std::vector<DensitySample>& d) {
  json out = json::array();
  for (const auto& s : d) out.push_back({s.x, s.density});
  return out;
}

Scenario apply_globals(Scenario s, const Globals& g) {
  if (g.tolerance_set) s.tolerance = g.tolerance;
  if (g.flow_step_set) s.flow_step = g.flow_step;
  if (!g.output.empty()) s.output = g.output;
  s.circle.flow_step = s.flow_step;
  return s;
}

}  // namespace

Scenario parse_scenario(const json& j) {
  allow_only(j, "", {"space", "array", "triple", "ops", "tolerance", "flow_step",
                     "correct_rotation", "output"});
  Scenario s;
  if (j.contains("space")) {
    if (!j.at("space").is_string()) throw ValidationError("space: expected a string");
    s.space = j.at("space").get<std::string>();
    if (s.space != "real" && s.space != "circle")
      throw ValidationError("space: must be \"real\" or \"circle\"");
  }
  s.tolerance = get_number(j, "tolerance", "", 0.05);
  if (!(s.tolerance > 0.0)) throw ValidationError("tolerance: must be positive");
  s.flow_step = get_number(j, "flow_step", "", kDefaultFlowStep);
  if (!(s.flow_step > 0.0) || s.flow_step > kMaxFlowStep)
    throw ValidationError("flow_step: must lie in (0, 1e-2]");
  if (j.contains("correct_rotation")) {
    if (!j.at("correct_rotation").is_boolean())
      throw ValidationError("correct_rotation: expected a boolean");
    s.correct_rotation = j.at("correct_rotation").get<bool>();
  }
  if (j.contains("output")) {
    if (!j.at("output").is_string()) throw ValidationError("output: expected a string");
    s.output = j.at("output").get<std::string>();
  }
  if (!j.contains("array")) throw ValidationError("array: required");
  if (s.space == "real") {
    s.array = parse_real_array(j.at("array"));
    if (j.contains("triple")) {
      const json& t = j.at("triple");
      allow_only(t, "triple", {"m", "gamma", "sigma"});
      FiniteAtomicMeasure sigma = t.contains("sigma")
                                      ? measure_from_json(t.at("sigma"), Role::parameter,
                                                          "triple.sigma")
                                      : FiniteAtomicMeasure::zero();
      try {
        s.triple = LevyTriple(get_number(t, "m", "triple.", 1.0),
                              get_number(t, "gamma", "triple.", 0.0), sigma);
      } catch (const ValidationError& e) {
        throw ValidationError(std::string("triple.") + e.what());
      }
    }
    if (j.contains("ops")) {
      if (!j.at("ops").is_array()) throw ValidationError("ops: expected an array");
      for (const auto& o : j.at("ops")) {
        if (!o.is_string()) throw ValidationError("ops: expected operation names");
        try {
          s.ops.push_back(parse_operation(o.get<std::string>()));
        } catch (const ValidationError& e) {
          throw ValidationError(std::string("ops: ") + e.what());
        }
      }
    }
  } else {
    s.circle = parse_circle_array(j.at("array"));
    if (!j.contains("triple")) throw ValidationError("triple: required for the circle space");
    const json& t = j.at("triple");
    allow_only(t, "triple", {"beta", "sigma"});
    CircleMeasure sigma = t.contains("sigma")
                              ? circle_measure_from_json(t.at("sigma"), Role::parameter,
                                                         "triple.sigma")
                              : CircleMeasure::zero();
    s.generator = CircleGenerator(get_number(t, "beta", "triple.", 0.0), sigma);
    s.circle.generator = *s.generator;
    s.circle.flow_step = s.flow_step;
    if (j.contains("ops")) throw ValidationError("ops: not used for the circle space");
    prefix_validate(s.circle);
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("scenario: cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("scenario: ") + e.what());
  }
  return parse_scenario(j);
}

json limit_run(const Scenario& s) {
  if (s.space != "real") throw ValidationError("space: limit-run needs the real space");
  const ArraySpec& spec = s.array;
  const bool probability = probability_rows(spec);
  std::vector<Operation> ops = s.ops;
  if (ops.empty())
    ops = probability ? std::vector<Operation>{Operation::classical, Operation::free,
                                               Operation::boolean, Operation::monotone}
                      : std::vector<Operation>{Operation::boolean, Operation::monotone};
  for (Operation op : ops)
    if (!probability && (op == Operation::classical || op == Operation::free))
      throw ValidationError("ops: " + to_string(op) + " powers need probability rows");
  const LevyTriple T = s.triple ? *s.triple : estimate_limit(spec);
  VerdictRule rule;
  rule.tolerance = s.tolerance;

  json cond = json::array(), chern = json::array(), reports = json::array();
  for (int n : spec.n_values) {
    cond.push_back(to_json(condition_e(spec, n)));
    chern.push_back({{"n", n}, {"residual", chernoff_residual(spec, T, n)}});
  }
  for (Operation op : ops) {
    OperationReport r;
    try {
      r = run_powers(spec, op, target_for(op, T, s.flow_step), rule);
    } catch (const NumericalError& e) {
      r = {op, {}, 0.0, false, std::string("target: ") + e.what()};
    }
    reports.push_back(to_json(r));
  }
  json tight = json::array();
  for (const auto& row : tightness_diagnostics(spec, spec.largest_n(), {5.0, 10.0, 20.0}))
    tight.push_back({{"y", row.y},
                     {"left", row.left},
                     {"right", row.right},
                     {"holds", row.holds},
                     {"right_over_y", row.right_over_y}});
  return {{"command", "limit-run"},
          {"family", to_string(spec.family)},
          {"n_values", spec.n_values},
          {"limit", to_json(T)},
          {"limit_source", s.triple ? "scenario" : "condition_e"},
          {"grids", real_grids()},
          {"condition_e", cond},
          {"chernoff_residual", chern},
          {"operations", reports},
          {"tightness", tight},
          {"tolerance", s.tolerance},
          {"flow_step", s.flow_step}};
}

std::pair<json, bool> bp_check(const Scenario& s) {
  if (s.space != "real") throw ValidationError("space: bp-check needs the real space");
  VerdictRule rule;
  rule.tolerance = s.tolerance;
  ConvergenceReport r;
  std::string mode;
  if (probability_rows(s.array)) {
    r = bp_crosscheck(s.array, s.triple, rule, s.flow_step);
    mode = "four operations";
  } else {
    const LevyTriple T = s.triple ? *s.triple : estimate_limit(s.array);
    r = subprobability_equivalence(s.array, T, rule, s.flow_step);
    mode = "boolean and monotone";
  }
  json out = to_json(r);
  out["command"] = "bp-check";
  out["mode"] = mode;
  out["family"] = to_string(s.array.family);
  out["grids"] = real_grids();
  out["tolerance"] = s.tolerance;
  out["flow_step"] = s.flow_step;
  return {out, r.verdicts_agree};
}

json circle_run(const Scenario& s) {
  if (s.space != "circle" || !s.generator)
    throw ValidationError("space: circle-run needs the circle space");
  VerdictRule rule;
  rule.tolerance = s.tolerance;
  CircleArraySpec spec = s.circle;
  spec.flow_step = s.flow_step;
  const CircleEquivalence eq = circle_equivalence(spec, *s.generator, rule);
  json findings = json::array();
  if (!eq.beta.holds) findings.push_back("beta condition fails at the horizon");
  if (!eq.verdicts_agree) findings.push_back("boolean and monotone verdicts disagree");
  if (!eq.boolean.error.empty()) findings.push_back("boolean: " + eq.boolean.error);
  if (!eq.monotone.error.empty()) findings.push_back("monotone: " + eq.monotone.error);
  json out = {{"command", "circle-run"},
              {"family", to_string(spec.family)},
              {"n_values", spec.n_values},
              {"generator",
               {{"beta", s.generator->beta}, {"sigma", to_json(s.generator->sigma)}}},
              {"grids", {{"disk", points_json(disk_points())}}},
              {"beta_condition", {{"value", eq.beta.value}, {"holds", eq.beta.holds}}},
              {"operations", {to_json(eq.boolean), to_json(eq.monotone)}},
              {"verdicts_agree", eq.verdicts_agree},
              {"tolerance", s.tolerance},
              {"flow_step", s.flow_step}};
  if (s.correct_rotation) {
    const RotationReport rr = rotation_correction(spec, rule);
    out["rotation"] = {{"ell", rr.ell},
                       {"ambiguous", rr.ambiguous},
                       {"uncorrected", to_json(rr.uncorrected)},
                       {"corrected", to_json(rr.corrected)}};
    for (std::size_t i = 0; i < rr.ambiguous.size(); ++i)
      if (rr.ambiguous[i])
        findings.push_back("rotation: ambiguous ell at n = " + std::to_string(spec.n_values[i]));
  }
  out["findings"] = findings;
  return out;
}

namespace {

struct TripleArgs {
  double m = 1.0;
  double gamma = 0.0;
  std::string sigma;

  LevyTriple triple() const { return LevyTriple(m, gamma, parse_atoms(sigma, Role::parameter)); }
};

void add_triple(CLI::App* sub, TripleArgs& t) {
  sub->add_option("--m", t.m, "total mass m in (0,1]");
  sub->add_option("--gamma", t.gamma, "drift gamma");
  sub->add_option("--sigma", t.sigma, "sigma atoms as pos:weight,pos:weight");
}

struct DensityArgs {
  double x_min = -4.0;
  double x_max = 4.0;
  int bins = 801;
};

void add_window(CLI::App* sub, DensityArgs& d) {
  sub->add_option("--x-min", d.x_min, "density window start");
  sub->add_option("--x-max", d.x_max, "density window end");
  sub->add_option("--bins", d.bins, "density samples in the window");
}

void write_density_result(const json& header, const json& extra,
                          const std::vector<DensitySample>& density,
                          const std::vector<Atom>& atoms, const Globals& g, std::ostream& out) {
  if (g.format == "csv") {
    if (!density.empty()) {
      emit(density_text(header, density), g.output, out);
    } else {
      std::string text;
      for (const auto& [k, v] : header.items()) text += "# " + k + "=" + v.dump() + "\n";
      text += "position,weight\n";
      for (const auto& a : atoms) {
        std::ostringstream row;
        row.precision(17);
        row << a.position << "," << a.weight << "\n";
        text += row.str();
      }
      emit(text, g.output, out);
    }
  } else {
    json j = extra;
    j["engine"] = header;
    j["atoms"] = atoms_json(atoms);
    if (!density.empty()) j["density"] = density_json(density);
    emit(j.dump(2) + "\n", g.output, out);
  }
  if (!g.svg.empty() && !density.empty()) emit(density_svg(density), g.svg, out);
}

InversionResult invert(const ComplexFunction& G, const Globals& g, const DensityArgs& d) {
  if (!(d.x_max > d.x_min) || d.bins < 2)
    throw ValidationError("window: need x-max > x-min and bins >= 2");
  if (!(g.grid_eps > 0.0)) throw ValidationError("grid-eps: must be positive");
  return stieltjes_invert(G, g.grid_eps, {d.x_min, d.x_max}, d.bins);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"ncp: transforms, convolutions and limit theorems for non-commutative probability"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--grid-eps", g.grid_eps, "Im z of the inversion line");
  auto* fs = app.add_option("--flow-step", g.flow_step, "RK4 step for flows");
  auto* tol = app.add_option("--tolerance", g.tolerance, "verdict tolerance");
  app.add_option("--output", g.output, "output file (default stdout)");
  app.add_option("--format", g.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--svg", g.svg, "write a density plot to this SVG file");

  TripleArgs triple;
  DensityArgs window;
  std::string op_name;
  auto* idiv = app.add_subcommand("idiv", "infinitely divisible law of a Levy triple");
  add_triple(idiv, triple);
  add_window(idiv, window);
  idiv->add_option("--op", op_name, "classical|free|boolean|monotone")->required();

  std::string mu_text, nu_text;
  auto* conv = app.add_subcommand("convolve", "convolve two atomic measures");
  conv->add_option("--mu", mu_text, "pos:weight,...")->required();
  conv->add_option("--nu", nu_text, "pos:weight,...")->required();
  conv->add_option("--op", op_name, "classical|free|boolean|monotone")->required();
  add_window(conv, window);

  double t_end = 1.0;
  auto* flow = app.add_subcommand("flow", "trace the monotone flow F_t on Z_R");
  add_triple(flow, triple);
  flow->add_option("--t-end", t_end, "final time");

  std::string scenario_path;
  auto* limit = app.add_subcommand("limit-run", "powers of a triangular array");
  limit->add_option("scenario", scenario_path, "scenario JSON")->required();
  auto* bp = app.add_subcommand("bp-check", "verdict agreement across operations");
  bp->add_option("scenario", scenario_path, "scenario JSON")->required();
  auto* circ = app.add_subcommand("circle-run", "multiplicative arrays on the circle");
  circ->add_option("scenario", scenario_path, "scenario JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidation;
  }
  g.flow_step_set = fs->count() > 0;
  g.tolerance_set = tol->count() > 0;

  try {
    if (g.flow_step_set && (!(g.flow_step > 0.0) || g.flow_step > kMaxFlowStep))
      throw ValidationError("flow-step: must lie in (0, 1e-2]");
    const json header = engine_header(g.grid_eps, g.flow_step, g.tolerance);
    if (idiv->parsed()) {
      const Operation op = parse_operation(op_name);
      const LevyTriple T = triple.triple();
      InversionResult inv;
      json extra = {{"command", "idiv"}, {"op", to_string(op)}, {"triple", to_json(T)}};
      switch (op) {
        case Operation::boolean:
          inv.atoms = boolean_idiv(T).atoms();
          break;
        case Operation::monotone:
          inv = invert([&](cplx z) { return 1.0 / flow_at<double>(T, z, 1.0, g.flow_step); }, g,
                       window);
          break;
        case Operation::free:
          inv = invert([&](cplx z) { return 1.0 / free_idiv_at(T, z); }, g, window);
          break;
        case Operation::classical:
          inv.density = clip(cf_density(classical_idiv_cf(T)), {window.x_min, window.x_max});
          break;
      }
      write_density_result(header, extra, inv.density, inv.atoms, g, out);
    } else if (conv->parsed()) {
      const Operation op = parse_operation(op_name);
      const FiniteAtomicMeasure mu = parse_atoms(mu_text, Role::state);
      const FiniteAtomicMeasure nu = parse_atoms(nu_text, Role::state);
      json extra = {{"command", "convolve"}, {"op", to_string(op)},
                    {"mu", to_json(mu)}, {"nu", to_json(nu)}};
      InversionResult inv;
      switch (op) {
        case Operation::classical:
          inv.atoms = classical_convolve(mu, nu).atoms();
          break;
        case Operation::boolean:
          inv.atoms = boolean_convolve(mu, nu).atoms();
          break;
        case Operation::monotone:
          inv.atoms = monotone_convolve(mu, nu).atoms();
          break;
        case Operation::free: {
          const TransformGrid grid = free_convolve(mu, nu);
          extra["grids"] = real_grids();
          extra["F_values"] = to_json(grid);
          const RationalMap Fm = f_transform(mu), Fn = f_transform(nu);
          inv = invert([&](cplx z) { return 1.0 / free_convolve_at(Fm, Fn, z); }, g, window);
          break;
        }
      }
      write_density_result(header, extra, inv.density, inv.atoms, g, out);
    } else if (flow->parsed()) {
      const LevyTriple T = triple.triple();
      const FlowResult fr = monotone_idiv_flow(T, t_end, g.flow_step);
      if (g.format == "csv") {
        std::ostringstream os;
        os.precision(17);
        os << "t,re_z,im_z,re_F,im_F\n";
        for (std::size_t i = 0; i < fr.times.size(); ++i)
          for (Eigen::Index p = 0; p < fr.maps[i].points.size(); ++p)
            os << fr.times[i] << "," << fr.maps[i].points[p].real() << ","
               << fr.maps[i].points[p].imag() << "," << fr.maps[i].values[p].real() << ","
               << fr.maps[i].values[p].imag() << "\n";
        emit(os.str(), g.output, out);
      } else {
        json maps = json::array();
        for (std::size_t i = 0; i < fr.times.size(); ++i)
          maps.push_back({{"t", fr.times[i]}, {"grid", to_json(fr.maps[i])}});
        json j = {{"command", "flow"}, {"triple", to_json(T)}, {"engine", header},
                  {"step", fr.step_size}, {"maps", maps}};
        emit(j.dump(2) + "\n", g.output, out);
      }
    } else {
      Scenario s = apply_globals(load_scenario(scenario_path), g);
      if (limit->parsed()) {
        emit(limit_run(s).dump(2) + "\n", s.output, out);
      } else if (bp->parsed()) {
        auto [report, agree] = bp_check(s);
        emit(report.dump(2) + "\n", s.output, out);
        return agree ? kOk : kDisagree;
      } else if (circ->parsed()) {
        emit(circle_run(s).dump(2) + "\n", s.output, out);
      }
    }
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return kValidation;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const json::exception& e) {
    err << "validation error: " << e.what() << "\n";
    return kValidation;
  }
  return kOk;
}

}  // namespace ncp::cli
