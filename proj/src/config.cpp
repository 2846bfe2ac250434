#include "nlsinv/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"

namespace nlsinv {

using nlohmann::json;

void RunConfig::validate() const {
  NLSINV_REQUIRE(m >= 2 && m <= pie::kMaxOrder, "config: m must be in [2, 12]");
  NLSINV_REQUIRE(std::isfinite(k) && k > 1.0, "config: k must be > 1");
  NLSINV_REQUIRE(std::isfinite(beta) && beta > 0.0 && beta <= 1.0, "config: beta must be in (0, 1]");
  NLSINV_REQUIRE(grid.nr >= 3, "config: grid.Nr must be >= 3");
  NLSINV_REQUIRE(grid.ntheta >= 4 && grid.ntheta % 2 == 0, "config: grid.Ntheta must be even and >= 4");
  NLSINV_REQUIRE(grid.radius > 0.0, "config: grid.R must be > 0");
  NLSINV_REQUIRE(synthesis_grid >= 2, "config: synthesis_grid must be >= 2");
  NLSINV_REQUIRE(std::isfinite(noise_level) && noise_level >= 0.0, "config: noise_level must be >= 0");
  NLSINV_REQUIRE(!cutoff_override || *cutoff_override > 0.0, "config: cutoff_override must be > 0");
  NLSINV_REQUIRE(lattice_step > 0.0, "config: lattice_step must be > 0");
  NLSINV_REQUIRE(threads >= 0, "config: threads must be >= 0");
  solver.validate();
  potential.validate(grid.radius);
}

namespace {

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw FormatError("config: '" + where + "' must be an object");
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || item.key() == a;
    if (!ok) throw FormatError("config: unknown key '" + where + item.key() + "'");
  }
}

double get_double(const json& j, const std::string& key) {
  if (!j.is_number()) throw FormatError("config: '" + key + "' must be a number");
  return j.get<double>();
}

int get_int(const json& j, const std::string& key) {
  if (!j.is_number_integer()) throw FormatError("config: '" + key + "' must be an integer");
  return j.get<int>();
}

std::string get_string(const json& j, const std::string& key) {
  if (!j.is_string()) throw FormatError("config: '" + key + "' must be a string");
  return j.get<std::string>();
}

Vec2 get_vec2(const json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 2) throw FormatError("config: '" + key + "' must be [x, y]");
  return {get_double(j[0], key), get_double(j[1], key)};
}

PotentialSpec parse_potential(const json& j) {
  check_keys(j, "potential.", {"kind", "components", "support_radius"});
  if (!j.contains("kind")) throw FormatError("config: potential.kind is required");
  const PotentialKind kind = potential_kind_from_string(get_string(j["kind"], "potential.kind"));
  PotentialSpec spec = kind == PotentialKind::GaussianSum           ? PotentialSpec::default_gaussian()
                       : kind == PotentialKind::DiskPiecewiseConstant ? PotentialSpec::default_disks()
                                                                      : PotentialSpec::zero();
  if (j.contains("support_radius"))
    spec.support_radius = get_double(j["support_radius"], "potential.support_radius");
  if (j.contains("components")) {
    const json& arr = j["components"];
    if (!arr.is_array()) throw FormatError("config: potential.components must be an array");
    spec.components.clear();
    for (const json& c : arr) {
      check_keys(c, "potential.components[].", {"center", "scale", "amplitude"});
      if (!c.contains("center") || !c.contains("scale") || !c.contains("amplitude"))
        throw FormatError("config: potential component needs center, scale, amplitude");
      spec.components.push_back({get_vec2(c["center"], "center"), get_double(c["scale"], "scale"),
                                 get_double(c["amplitude"], "amplitude")});
    }
  }
  return spec;
}

SolverConfig parse_solver(const json& j) {
  check_keys(j, "solver.", {"linear_tol", "nonlinear_tol", "max_fixed_point_iters",
                            "max_newton_iters", "method", "resonance_tol"});
  SolverConfig s;
  if (j.contains("linear_tol")) s.linear_tol = get_double(j["linear_tol"], "solver.linear_tol");
  if (j.contains("nonlinear_tol"))
    s.nonlinear_tol = get_double(j["nonlinear_tol"], "solver.nonlinear_tol");
  if (j.contains("max_fixed_point_iters"))
    s.max_fixed_point_iters = get_int(j["max_fixed_point_iters"], "solver.max_fixed_point_iters");
  if (j.contains("max_newton_iters"))
    s.max_newton_iters = get_int(j["max_newton_iters"], "solver.max_newton_iters");
  if (j.contains("method"))
    s.method = nonlinear_method_from_string(get_string(j["method"], "solver.method"));
  if (j.contains("resonance_tol"))
    s.resonance_tol = get_double(j["resonance_tol"], "solver.resonance_tol");
  return s;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("config: invalid JSON: ") + e.what());
  }
  check_keys(j, "", {"m", "k", "beta", "grid", "synthesis_grid", "potential", "mode",
                     "noise_level", "solver", "cutoff_override", "lattice_step", "output_dir",
                     "seed", "threads"});
  RunConfig c;
  if (j.contains("m")) c.m = get_int(j["m"], "m");
  if (j.contains("k")) c.k = get_double(j["k"], "k");
  if (j.contains("beta")) c.beta = get_double(j["beta"], "beta");
  if (j.contains("grid")) {
    const json& g = j["grid"];
    check_keys(g, "grid.", {"Nr", "Ntheta", "R"});
    if (g.contains("Nr")) c.grid.nr = get_int(g["Nr"], "grid.Nr");
    if (g.contains("Ntheta")) c.grid.ntheta = get_int(g["Ntheta"], "grid.Ntheta");
    if (g.contains("R")) c.grid.radius = get_double(g["R"], "grid.R");
  }
  if (j.contains("synthesis_grid")) c.synthesis_grid = get_int(j["synthesis_grid"], "synthesis_grid");
  if (j.contains("potential")) c.potential = parse_potential(j["potential"]);
  if (j.contains("mode")) c.mode = measure::mode_from_string(get_string(j["mode"], "mode"));
  if (j.contains("noise_level")) c.noise_level = get_double(j["noise_level"], "noise_level");
  if (j.contains("solver")) c.solver = parse_solver(j["solver"]);
  if (j.contains("cutoff_override") && !j["cutoff_override"].is_null())
    c.cutoff_override = get_double(j["cutoff_override"], "cutoff_override");
  if (j.contains("lattice_step")) c.lattice_step = get_double(j["lattice_step"], "lattice_step");
  if (j.contains("output_dir")) c.output_dir = get_string(j["output_dir"], "output_dir");
  if (j.contains("seed")) {
    const json& s = j["seed"];
    if (!s.is_number_unsigned()) throw FormatError("config: 'seed' must be a non-negative integer");
    c.seed = s.get<std::uint64_t>();
  }
  if (j.contains("threads")) c.threads = get_int(j["threads"], "threads");
  c.validate();
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_run_config(ss.str());
}

std::string to_json(const RunConfig& c) {
  json comps = json::array();
  for (const auto& p : c.potential.components)
    comps.push_back({{"center", {p.center[0], p.center[1]}},
                     {"scale", p.scale},
                     {"amplitude", p.amplitude}});
  json j = {
      {"m", c.m},
      {"k", c.k},
      {"beta", c.beta},
      {"grid", {{"Nr", c.grid.nr}, {"Ntheta", c.grid.ntheta}, {"R", c.grid.radius}}},
      {"synthesis_grid", c.synthesis_grid},
      {"potential",
       {{"kind", to_string(c.potential.kind)},
        {"components", comps},
        {"support_radius", c.potential.support_radius}}},
      {"mode", measure::to_string(c.mode)},
      {"noise_level", c.noise_level},
      {"solver",
       {{"linear_tol", c.solver.linear_tol},
        {"nonlinear_tol", c.solver.nonlinear_tol},
        {"max_fixed_point_iters", c.solver.max_fixed_point_iters},
        {"max_newton_iters", c.solver.max_newton_iters},
        {"method", to_string(c.solver.method)},
        {"resonance_tol", c.solver.resonance_tol}}},
      {"cutoff_override", c.cutoff_override ? json(*c.cutoff_override) : json(nullptr)},
      {"lattice_step", c.lattice_step},
      {"output_dir", c.output_dir},
      {"seed", c.seed},
      {"threads", c.threads},
  };
  return j.dump(2);
}

}  // namespace nlsinv
