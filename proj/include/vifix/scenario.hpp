#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "vifix/mappings.hpp"
#include "vifix/operators.hpp"
#include "vifix/sets.hpp"
#include "vifix/solvers.hpp"

namespace vifix {

/// Raised on malformed scenario files; the message names the offending field.
class ScenarioError : public Error {
 public:
  using Error::Error;
};

enum class Scheme { halpern, halpern_averaged, hsdm, wmap_hsdm, coupling };

Scheme scheme_from_name(const std::string& name);
std::string scheme_name(Scheme scheme);

/// Parsed experiment description. See docs/scenario-format.md for the file
/// syntax; every referenced set name must resolve and all dimensions must be
/// consistent.
struct Scenario {
  std::string name;
  std::size_t dim = 0;
  std::uint64_t seed = 0;
  std::map<std::string, ConvexSet> sets;
  std::optional<MapSequence> map_sequence;  // absent only before finalize
  std::vector<NonexpansiveMap> base_maps;   // the declared T_k list (wmap scheme)
  std::optional<MonotoneOperator> op;
  StepSchedule schedule = StepSchedule::harmonic();
  AveragingSchedule averaging = AveragingSchedule::constant(0.5);
  double gamma = 0.5;
  Scheme scheme = Scheme::hsdm;
  Vector start = Vector::zero(1);
  std::optional<Vector> anchor;             // Halpern anchor u
  Tolerance tolerance = Tolerance();
  enum class OracleMode { automatic, none, explicit_point } oracle_mode = OracleMode::automatic;
  std::optional<Vector> oracle_point;
};

Scenario parse_scenario(const nlohmann::json& doc);
Scenario load_scenario(const std::filesystem::path& path);

struct RunOptions {
  std::optional<std::string> scheme_override;
  std::optional<double> tol_override;
  std::optional<std::size_t> max_iter_override;
  std::filesystem::path out_dir = ".";
  std::string trace_format = "csv";  // "csv" or "json"
  bool require_conditions = false;
};

struct RunReport {
  int exit_code;  // 0 tolerance, 2 max_iter, 3 invariant-check failure
  nlohmann::json summary;
  std::filesystem::path trace_path;
  std::filesystem::path summary_path;
};

/// Executes the scenario's scheme, writes the trace (CSV or JSON) and the
/// JSON summary into out_dir, and returns the report. Throws ScenarioError
/// on malformed input; refuses (ScenarioError) schedules or sequences whose
/// by-construction flags do not certify the scheme's convergence conditions
/// when require_conditions is set.
RunReport run_scenario(const std::filesystem::path& path, const RunOptions& options);
RunReport run_scenario(const Scenario& scenario, const RunOptions& options);

}  // namespace vifix
