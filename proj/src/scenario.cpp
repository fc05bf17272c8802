#include "vifix/scenario.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "vifix/oracle.hpp"
#include "vifix/trace_io.hpp"

namespace vifix {

namespace {

using nlohmann::json;

std::string join_path(const std::string& path, const std::string& field) {
  return path.empty() ? field : path + "." + field;
}

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ScenarioError("scenario: " + field + ": " + what);
}

const json& require(const json& obj, const std::string& field, const std::string& path) {
  if (!obj.is_object()) {
    fail(path, "expected an object");
  }
  auto it = obj.find(field);
  if (it == obj.end()) {
    fail(join_path(path, field), "missing required field");
  }
  return *it;
}

std::string get_string(const json& obj, const std::string& field, const std::string& path) {
  const json& v = require(obj, field, path);
  if (!v.is_string()) {
    fail(join_path(path, field), "expected a string");
  }
  return v.get<std::string>();
}

double get_number(const json& obj, const std::string& field, const std::string& path) {
  const json& v = require(obj, field, path);
  if (!v.is_number()) {
    fail(join_path(path, field), "expected a number");
  }
  return v.get<double>();
}

Vector get_vector(const json& obj, const std::string& field, const std::string& path) {
  const json& v = require(obj, field, path);
  try {
    return vector_from_json(v, join_path(path, field));
  } catch (const std::invalid_argument& e) {
    fail(join_path(path, field), e.what());
  }
}

}  // namespace

Scheme scheme_from_name(const std::string& name) {
  if (name == "halpern") return Scheme::halpern;
  if (name == "halpern_averaged") return Scheme::halpern_averaged;
  if (name == "hsdm") return Scheme::hsdm;
  if (name == "wmap_hsdm") return Scheme::wmap_hsdm;
  if (name == "coupling") return Scheme::coupling;
  throw ScenarioError(
      "scenario: scheme: unknown scheme '" + name +
      "' (expected halpern, halpern_averaged, hsdm, wmap_hsdm or coupling)");
}

std::string scheme_name(Scheme scheme) {
  switch (scheme) {
    case Scheme::halpern: return "halpern";
    case Scheme::halpern_averaged: return "halpern_averaged";
    case Scheme::hsdm: return "hsdm";
    case Scheme::wmap_hsdm: return "wmap_hsdm";
    case Scheme::coupling: return "coupling";
  }
  throw std::logic_error("scheme_name: unreachable");
}

namespace {

ConvexSet parse_set(const json& spec, const std::map<std::string, ConvexSet>& named,
                    std::size_t dim, const std::string& path);

ConvexSet resolve_set(const json& spec, const std::map<std::string, ConvexSet>& named,
                      std::size_t dim, const std::string& path) {
  if (spec.is_string()) {
    const std::string name = spec.get<std::string>();
    auto it = named.find(name);
    if (it == named.end()) {
      fail(path, "unknown set name '" + name + "'");
    }
    return it->second;
  }
  return parse_set(spec, named, dim, path);
}

ConvexSet parse_set(const json& spec, const std::map<std::string, ConvexSet>& named,
                    std::size_t dim, const std::string& path) {
  const std::string kind = get_string(spec, "kind", path);
  try {
    if (kind == "halfspace") {
      return ConvexSet::halfspace(get_vector(spec, "normal", path),
                                  get_number(spec, "offset", path));
    }
    if (kind == "ball") {
      return ConvexSet::ball(get_vector(spec, "center", path),
                             get_number(spec, "radius", path));
    }
    if (kind == "box") {
      return ConvexSet::box(get_vector(spec, "lo", path), get_vector(spec, "hi", path));
    }
    if (kind == "affine") {
      const json& dirs = require(spec, "directions", path);
      if (!dirs.is_array()) {
        fail(path + ".directions", "expected an array of vectors");
      }
      std::vector<Vector> directions;
      for (std::size_t i = 0; i < dirs.size(); ++i) {
        directions.push_back(
            vector_from_json(dirs[i], path + ".directions[" + std::to_string(i) + "]"));
      }
      return ConvexSet::affine(get_vector(spec, "point", path), std::move(directions));
    }
    if (kind == "whole_space") {
      return ConvexSet::whole_space(dim);
    }
    if (kind == "intersection") {
      const json& members_json = require(spec, "members", path);
      if (!members_json.is_array() || members_json.empty()) {
        fail(path + ".members", "expected a nonempty array");
      }
      std::vector<ConvexSet> members;
      for (std::size_t i = 0; i < members_json.size(); ++i) {
        members.push_back(resolve_set(members_json[i], named, dim,
                                      path + ".members[" + std::to_string(i) + "]"));
      }
      return ConvexSet::intersection(std::move(members),
                                     get_vector(spec, "witness", path));
    }
  } catch (const ScenarioError&) {
    throw;
  } catch (const std::exception& e) {
    fail(path, e.what());
  }
  fail(path + ".kind", "unknown set kind '" + kind + "'");
}

NonexpansiveMap parse_map(const json& spec, const std::map<std::string, ConvexSet>& named,
                          std::size_t dim, const std::string& path) {
  const std::string kind = get_string(spec, "kind", path);
  try {
    if (kind == "identity") {
      return NonexpansiveMap::identity(dim);
    }
    if (kind == "projection") {
      return NonexpansiveMap::projection(
          resolve_set(require(spec, "set", path), named, dim, path + ".set"));
    }
    if (kind == "averaged") {
      return NonexpansiveMap::averaged(
          get_number(spec, "alpha", path),
          parse_map(require(spec, "map", path), named, dim, path + ".map"));
    }
    if (kind == "composition" || kind == "convex_combination") {
      const json& maps_json = require(spec, "maps", path);
      if (!maps_json.is_array() || maps_json.empty()) {
        fail(path + ".maps", "expected a nonempty array");
      }
      std::vector<NonexpansiveMap> maps;
      for (std::size_t i = 0; i < maps_json.size(); ++i) {
        maps.push_back(
            parse_map(maps_json[i], named, dim, path + ".maps[" + std::to_string(i) + "]"));
      }
      if (kind == "composition") {
        return NonexpansiveMap::composition(std::move(maps));
      }
      const json& weights_json = require(spec, "weights", path);
      if (!weights_json.is_array() || weights_json.size() != maps.size()) {
        fail(path + ".weights", "expected an array matching maps");
      }
      std::vector<double> weights;
      for (const auto& w : weights_json) {
        if (!w.is_number()) {
          fail(path + ".weights", "expected numbers");
        }
        weights.push_back(w.get<double>());
      }
      return NonexpansiveMap::convex_combination(std::move(weights), std::move(maps));
    }
  } catch (const ScenarioError&) {
    throw;
  } catch (const std::exception& e) {
    fail(path, e.what());
  }
  fail(path + ".kind", "unknown map kind '" + kind + "'");
}

MonotoneOperator parse_operator(const json& spec, const std::string& path) {
  const std::string kind = get_string(spec, "kind", path);
  try {
    std::optional<MonotoneOperator> op;
    if (kind == "translation") {
      op = MonotoneOperator::translation(get_vector(spec, "u", path));
    } else if (kind == "affine") {
      const json& rows_json = require(spec, "matrix", path);
      if (!rows_json.is_array() || rows_json.empty()) {
        fail(path + ".matrix", "expected a nonempty array of rows");
      }
      std::vector<std::vector<double>> rows;
      for (const auto& row : rows_json) {
        if (!row.is_array()) {
          fail(path + ".matrix", "expected rows to be arrays of numbers");
        }
        std::vector<double> r;
        for (const auto& v : row) {
          if (!v.is_number()) {
            fail(path + ".matrix", "expected rows to be arrays of numbers");
          }
          r.push_back(v.get<double>());
        }
        rows.push_back(std::move(r));
      }
      op = MonotoneOperator::affine(rows, get_vector(spec, "b", path));
    } else {
      fail(path + ".kind", "unknown operator kind '" + kind + "'");
    }
    if (spec.contains("mu")) {
      op = rescale(*op, get_number(spec, "mu", path));
    }
    return *op;
  } catch (const ScenarioError&) {
    throw;
  } catch (const std::exception& e) {
    fail(path, e.what());
  }
}

StepSchedule parse_schedule(const json& spec, const std::string& path) {
  const std::string kind = get_string(spec, "kind", path);
  try {
    if (kind == "harmonic") {
      return StepSchedule::harmonic();
    }
    if (kind == "power") {
      return StepSchedule::power(get_number(spec, "p", path));
    }
    if (kind == "constant") {
      return StepSchedule::constant(get_number(spec, "c", path));
    }
  } catch (const ScenarioError&) {
    throw;
  } catch (const std::exception& e) {
    fail(path, e.what());
  }
  fail(path + ".kind", "unknown schedule kind '" + kind + "'");
}

}  // namespace

Scenario parse_scenario(const json& doc) {
  if (!doc.is_object()) {
    fail("<root>", "expected a JSON object");
  }
  Scenario s;
  s.name = get_string(doc, "name", "");
  const double dim_raw = get_number(doc, "dim", "");
  if (dim_raw < 1 || dim_raw != std::floor(dim_raw)) {
    fail("dim", "expected a positive integer");
  }
  s.dim = static_cast<std::size_t>(dim_raw);
  if (doc.contains("seed")) {
    s.seed = doc["seed"].is_number_unsigned() ? doc["seed"].get<std::uint64_t>()
                                              : static_cast<std::uint64_t>(
                                                    get_number(doc, "seed", ""));
  }

  if (doc.contains("sets")) {
    const json& sets_json = doc["sets"];
    if (!sets_json.is_object()) {
      fail("sets", "expected an object of named sets");
    }
    // Two passes so intersections can reference primitive sets by name.
    for (const auto& [name, spec] : sets_json.items()) {
      if (spec.is_object() && spec.contains("kind") && spec["kind"] == "intersection") {
        continue;
      }
      s.sets.emplace(name, parse_set(spec, s.sets, s.dim, "sets." + name));
    }
    for (const auto& [name, spec] : sets_json.items()) {
      if (spec.is_object() && spec.contains("kind") && spec["kind"] == "intersection") {
        s.sets.emplace(name, parse_set(spec, s.sets, s.dim, "sets." + name));
      }
    }
    for (const auto& [name, set] : s.sets) {
      if (set.dim() != s.dim) {
        fail("sets." + name, "dimension " + std::to_string(set.dim()) +
                                 " does not match scenario dim " + std::to_string(s.dim));
      }
    }
  }

  s.scheme = scheme_from_name(get_string(doc, "scheme", ""));

  const json& seq_json = require(doc, "map_sequence", "");
  const std::string seq_kind = get_string(seq_json, "kind", "map_sequence");
  const ConvexSet fixed_set = resolve_set(require(seq_json, "fixed_set", "map_sequence"),
                                          s.sets, s.dim, "map_sequence.fixed_set");
  try {
    if (seq_kind == "constant") {
      const NonexpansiveMap map =
          parse_map(require(seq_json, "map", "map_sequence"), s.sets, s.dim,
                    "map_sequence.map");
      s.base_maps = {map};
      s.map_sequence = MapSequence::constant(map, fixed_set);
    } else if (seq_kind == "cyclic" || seq_kind == "w_mapping_family") {
      const json& maps_json = require(seq_json, "maps", "map_sequence");
      if (!maps_json.is_array() || maps_json.empty()) {
        fail("map_sequence.maps", "expected a nonempty array");
      }
      for (std::size_t i = 0; i < maps_json.size(); ++i) {
        s.base_maps.push_back(parse_map(maps_json[i], s.sets, s.dim,
                                        "map_sequence.maps[" + std::to_string(i) + "]"));
      }
      if (seq_kind == "cyclic") {
        s.map_sequence = MapSequence::cyclic(s.base_maps, fixed_set);
      } else {
        const double gamma = seq_json.contains("gamma")
                                 ? get_number(seq_json, "gamma", "map_sequence")
                                 : 0.5;
        s.gamma = gamma;
        s.map_sequence = MapSequence::w_mapping_family(s.base_maps, gamma, fixed_set);
      }
    } else {
      fail("map_sequence.kind", "unknown map sequence kind '" + seq_kind + "'");
    }
  } catch (const ScenarioError&) {
    throw;
  } catch (const std::exception& e) {
    fail("map_sequence", e.what());
  }

  if (s.scheme == Scheme::wmap_hsdm && doc.contains("gamma")) {
    s.gamma = get_number(doc, "gamma", "");
  }

  const bool needs_operator = s.scheme == Scheme::hsdm || s.scheme == Scheme::wmap_hsdm ||
                              s.scheme == Scheme::coupling;
  if (needs_operator) {
    s.op = parse_operator(require(doc, "operator", ""), "operator");
    if (s.op->dim() != s.dim) {
      fail("operator", "dimension does not match scenario dim");
    }
  }
  const bool needs_anchor =
      s.scheme == Scheme::halpern || s.scheme == Scheme::halpern_averaged;
  if (needs_anchor || doc.contains("anchor")) {
    s.anchor = get_vector(doc, "anchor", "");
    if (s.anchor->dim() != s.dim) {
      fail("anchor", "dimension does not match scenario dim");
    }
  }

  if (doc.contains("schedule")) {
    s.schedule = parse_schedule(doc["schedule"], "schedule");
  }
  if (doc.contains("averaging")) {
    const json& avg = doc["averaging"];
    const std::string kind = get_string(avg, "kind", "averaging");
    if (kind != "constant") {
      fail("averaging.kind", "unknown averaging kind '" + kind + "'");
    }
    try {
      s.averaging = AveragingSchedule::constant(get_number(avg, "beta", "averaging"));
    } catch (const std::exception& e) {
      fail("averaging", e.what());
    }
  }

  s.start = get_vector(doc, "start", "");
  if (s.start.dim() != s.dim) {
    fail("start", "dimension does not match scenario dim");
  }

  if (doc.contains("tolerance")) {
    const json& tol = doc["tolerance"];
    const double abs_tol =
        tol.contains("abs_tol") ? get_number(tol, "abs_tol", "tolerance") : 1e-3;
    const double rel_tol =
        tol.contains("rel_tol") ? get_number(tol, "rel_tol", "tolerance") : 0.0;
    const double max_iter_raw =
        tol.contains("max_iter") ? get_number(tol, "max_iter", "tolerance") : 200000.0;
    if (max_iter_raw < 1 || max_iter_raw != std::floor(max_iter_raw)) {
      fail("tolerance.max_iter", "expected a positive integer");
    }
    try {
      s.tolerance = Tolerance(abs_tol, rel_tol, static_cast<std::size_t>(max_iter_raw));
    } catch (const std::exception& e) {
      fail("tolerance", e.what());
    }
  }

  if (doc.contains("oracle")) {
    const json& oracle = doc["oracle"];
    if (oracle.is_string() && oracle == "auto") {
      s.oracle_mode = Scenario::OracleMode::automatic;
    } else if (oracle.is_string() && oracle == "none") {
      s.oracle_mode = Scenario::OracleMode::none;
    } else if (oracle.is_array()) {
      s.oracle_mode = Scenario::OracleMode::explicit_point;
      s.oracle_point = vector_from_json(oracle, "oracle");
      if (s.oracle_point->dim() != s.dim) {
        fail("oracle", "dimension does not match scenario dim");
      }
    } else {
      fail("oracle", "expected \"auto\", \"none\" or an array of coordinates");
    }
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ScenarioError("scenario: cannot open file '" + path.string() + "'");
  }
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ScenarioError("scenario: '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_scenario(doc);
}

namespace {

void enforce_conditions(const Scenario& s) {
  const auto& lam = s.schedule.flags();
  const auto& seq = s.map_sequence->flags();
  auto refuse = [](const std::string& why) {
    throw ScenarioError("scenario: --require-conditions: " + why);
  };
  if (!lam.vanishes || !lam.divergent_sum) {
    refuse("step schedule must vanish with divergent sum (lambda_n -> 0, sum = inf)");
  }
  switch (s.scheme) {
    case Scheme::halpern:
    case Scheme::hsdm:
    case Scheme::coupling:
      if (!lam.summable_differences) {
        refuse("step schedule must have summable differences");
      }
      if (!seq.condition_z || !seq.condition_aktt) {
        refuse("map sequence is not certified for conditions (Z) and (aktt)");
      }
      break;
    case Scheme::halpern_averaged: {
      if (!seq.condition_z || !seq.condition_r) {
        refuse("map sequence is not certified for conditions (Z) and (R)");
      }
      const auto& beta = s.averaging.flags();
      if (!beta.liminf_positive || !beta.limsup_below_one) {
        refuse("averaging schedule must satisfy 0 < liminf beta <= limsup beta < 1");
      }
      break;
    }
    case Scheme::wmap_hsdm:
      // Only lambda_n -> 0 and divergent sum are required; gamma bounds are
      // validated when the W-mapping is built.
      break;
  }
}

std::optional<Vector> resolve_oracle(const Scenario& s) {
  switch (s.oracle_mode) {
    case Scenario::OracleMode::none:
      return std::nullopt;
    case Scenario::OracleMode::explicit_point:
      return s.oracle_point;
    case Scenario::OracleMode::automatic: {
      const Tolerance oracle_tol(std::min(1e-8, s.tolerance.abs_tol * 1e-2), 0.0, 1000000);
      const ConvexSet& fixed = s.map_sequence->common_fixed_set();
      if (s.scheme == Scheme::halpern || s.scheme == Scheme::halpern_averaged) {
        return halpern_limit_oracle(fixed, *s.anchor, oracle_tol);
      }
      return solve_vi_banach(fixed, *s.op, oracle_tol).solution;
    }
  }
  return std::nullopt;
}

struct RuntimeCheck {
  std::string name;
  bool passed;
  double value;
  double threshold;
};

json check_to_json(const RuntimeCheck& c) {
  return json{{"name", c.name},
              {"passed", c.passed},
              {"value", c.value},
              {"threshold", c.threshold}};
}

}  // namespace

RunReport run_scenario(const Scenario& s, const RunOptions& options) {
  Scenario scenario = s;
  if (options.scheme_override) {
    scenario.scheme = scheme_from_name(*options.scheme_override);
  }
  if (options.tol_override || options.max_iter_override) {
    scenario.tolerance = Tolerance(
        options.tol_override.value_or(scenario.tolerance.abs_tol),
        scenario.tolerance.rel_tol,
        options.max_iter_override.value_or(scenario.tolerance.max_iter));
  }
  if (options.trace_format != "csv" && options.trace_format != "json") {
    throw ScenarioError("scenario: trace format must be 'csv' or 'json', got '" +
                        options.trace_format + "'");
  }
  const bool needs_operator = scenario.scheme == Scheme::hsdm ||
                              scenario.scheme == Scheme::wmap_hsdm ||
                              scenario.scheme == Scheme::coupling;
  if (needs_operator && !scenario.op) {
    throw ScenarioError("scenario: operator: required by scheme " +
                        scheme_name(scenario.scheme));
  }
  if ((scenario.scheme == Scheme::halpern ||
       scenario.scheme == Scheme::halpern_averaged) &&
      !scenario.anchor) {
    throw ScenarioError("scenario: anchor: required by scheme " +
                        scheme_name(scenario.scheme));
  }
  if (options.require_conditions) {
    enforce_conditions(scenario);
  }

  const MapSequence& seq = *scenario.map_sequence;
  const std::optional<Vector> oracle =
      scenario.scheme == Scheme::coupling ? std::nullopt : resolve_oracle(scenario);

  IterationTrace trace{"", {}, Termination::max_iter};
  std::optional<CouplingResult> coupling;
  switch (scenario.scheme) {
    case Scheme::halpern:
      trace = halpern_iterate(seq, *scenario.anchor, scenario.start, scenario.schedule,
                              scenario.tolerance, oracle);
      break;
    case Scheme::halpern_averaged:
      trace = halpern_averaged_iterate(seq, *scenario.anchor, scenario.start,
                                       scenario.schedule, scenario.averaging,
                                       scenario.tolerance, oracle);
      break;
    case Scheme::hsdm:
      trace = hsdm_iterate(seq, *scenario.op, scenario.start, scenario.schedule,
                           scenario.tolerance, oracle);
      break;
    case Scheme::wmap_hsdm: {
      const auto base = scenario.base_maps;
      trace = wmap_hsdm_iterate(
          [base](std::size_t n) { return base[(n - 1) % base.size()]; },
          [g = scenario.gamma](std::size_t) { return g; }, *scenario.op, scenario.start,
          scenario.schedule, scenario.tolerance, oracle);
      break;
    }
    case Scheme::coupling: {
      coupling = coupling_experiment(seq, *scenario.op, scenario.start, scenario.schedule,
                                     scenario.tolerance);
      trace = coupling->trace_y;
      break;
    }
  }

  // Runtime invariant checks, seeded from the scenario.
  std::vector<RuntimeCheck> checks;
  {
    std::mt19937_64 rng(scenario.seed);
    const Region region(scenario.start,
                        std::max(2.0, 2.0 * distance(scenario.start,
                                                     seq.common_fixed_set().witness_point()) +
                                          1.0));
    double worst = 0.0;
    for (std::size_t n = 1; n <= 3; ++n) {
      worst = std::max(worst,
                       empirical_nonexpansiveness(seq.map_at(n), 200, region, rng));
    }
    checks.push_back({"map-nonexpansiveness", worst <= 1.0 + 1e-9, worst, 1.0 + 1e-9});

    if (scenario.op) {
      const auto report = verify_constants(*scenario.op, 200, region, rng);
      const bool passed = report.passed;
      checks.push_back({"operator-constants", passed, report.max_contraction_ratio,
                        theta(*scenario.op) + 1e-9});
    }
  }

  const TraceStep& last = trace.final_step();
  if (oracle && trace.terminated_by == Termination::tolerance) {
    checks.push_back({"final-oracle-distance",
                      last.oracle_distance.value() <= scenario.tolerance.abs_tol,
                      last.oracle_distance.value(), scenario.tolerance.abs_tol});
  }

  std::optional<double> final_vi_residual;
  if (scenario.op) {
    final_vi_residual = vi_residual(seq.common_fixed_set(), *scenario.op, last.iterate,
                                    scenario.tolerance);
    if (trace.terminated_by == Termination::tolerance && oracle) {
      checks.push_back({"vi-residual", *final_vi_residual <= 2.0 * scenario.tolerance.abs_tol,
                        *final_vi_residual, 2.0 * scenario.tolerance.abs_tol});
    }
  }
  if (coupling) {
    // Domination by the proof's recursion, seeded at the measured first diff.
    const double rate = coupling->contraction_rate;
    const auto& diffs = coupling->coupling_diffs;
    bool dominated = true;
    double eps = diffs.front();
    for (std::size_t n = 0; n < diffs.size(); ++n) {
      if (diffs[n] > eps + 1e-9) {
        dominated = false;
        break;
      }
      if (n + 1 < diffs.size()) {
        const double lam = (1.0 - rate) * coupling->trace_x.steps[n].lambda_n;
        const double gam = rate / (1.0 - rate) *
                           coupling->trace_x.steps[n].oracle_distance.value();
        eps = (1.0 - lam) * eps + lam * gam;
      }
    }
    checks.push_back({"coupling-domination", dominated, diffs.back(), 1e-9});
  }

  bool checks_passed = true;
  json checks_json = json::array();
  for (const auto& c : checks) {
    checks_passed = checks_passed && c.passed;
    checks_json.push_back(check_to_json(c));
  }

  // Artifacts.
  std::filesystem::create_directories(options.out_dir);
  const std::string stem = scenario.name + "." + scheme_name(scenario.scheme);
  const std::filesystem::path trace_path =
      options.out_dir / (stem + ".trace." + options.trace_format);
  {
    std::ofstream out(trace_path, std::ios::binary);
    if (!out) {
      throw ScenarioError("scenario: cannot write trace file '" + trace_path.string() +
                          "'");
    }
    if (options.trace_format == "csv") {
      write_trace_csv(trace, out);
    } else {
      write_trace_json(trace, out);
    }
  }

  json summary{
      {"scenario", scenario.name},
      {"scheme", scheme_name(scenario.scheme)},
      {"dim", scenario.dim},
      {"seed", scenario.seed},
      {"iterations", trace.steps.size()},
      {"terminated_by", termination_name(trace.terminated_by)},
      {"final_fix_residual", last.fix_residual},
      {"final_oracle_distance",
       last.oracle_distance ? json(*last.oracle_distance) : json()},
      {"final_vi_residual", final_vi_residual ? json(*final_vi_residual) : json()},
      {"final_iterate", vector_to_json(last.iterate)},
      {"checks", std::move(checks_json)},
      {"trace_path", trace_path.string()},
  };

  if (scenario.scheme == Scheme::coupling) {
    summary["oracle"] = json{{"solution", vector_to_json(coupling->vi_solution)},
                             {"iterations_used", nullptr},
                             {"final_step_norm", nullptr},
                             {"certified_rate", coupling->contraction_rate}};
    summary["coupling"] = json{
        {"final_diff", coupling->coupling_diffs.back()},
        {"anchor", vector_to_json(coupling->anchor)},
    };
  } else if (scenario.oracle_mode == Scenario::OracleMode::automatic && scenario.op &&
             (scenario.scheme == Scheme::hsdm || scenario.scheme == Scheme::wmap_hsdm)) {
    const Tolerance oracle_tol(std::min(1e-8, scenario.tolerance.abs_tol * 1e-2), 0.0,
                               1000000);
    summary["oracle"] =
        oracle_result_to_json(solve_vi_banach(seq.common_fixed_set(), *scenario.op,
                                              oracle_tol));
  } else if (oracle) {
    summary["oracle"] = json{{"solution", vector_to_json(*oracle)},
                             {"iterations_used", nullptr},
                             {"final_step_norm", nullptr},
                             {"certified_rate", nullptr}};
  } else {
    summary["oracle"] = nullptr;
  }

  int exit_code = 0;
  if (!checks_passed) {
    exit_code = 3;
  } else if (trace.terminated_by == Termination::max_iter) {
    exit_code = 2;
  }

  const std::filesystem::path summary_path = options.out_dir / (stem + ".summary.json");
  {
    std::ofstream out(summary_path, std::ios::binary);
    if (!out) {
      throw ScenarioError("scenario: cannot write summary file '" +
                          summary_path.string() + "'");
    }
    out << summary.dump(2) << "\n";
  }

  return RunReport{exit_code, std::move(summary), trace_path, summary_path};
}

RunReport run_scenario(const std::filesystem::path& path, const RunOptions& options) {
  return run_scenario(load_scenario(path), options);
}

}  // namespace vifix
