#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "vifix/checks.hpp"
#include "vifix/scenario.hpp"

namespace {

int cmd_run(const std::string& path, const vifix::RunOptions& options) {
  try {
    const vifix::RunReport report = vifix::run_scenario(path, options);
    std::cout << report.summary.dump(2) << "\n";
    if (report.exit_code == 2) {
      std::cerr << "vifix: stopped at max_iter without reaching tolerance\n";
    } else if (report.exit_code == 3) {
      std::cerr << "vifix: an invariant check failed (see summary)\n";
    }
    return report.exit_code;
  } catch (const vifix::ScenarioError& e) {
    std::cerr << "vifix: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "vifix: error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_check(const std::vector<std::string>& names, std::uint64_t seed) {
  bool all_passed = true;
  try {
    const auto run_one = [&](const vifix::CheckResult& result) {
      std::cout << (result.passed ? "[PASS] " : "[FAIL] ") << result.name << ": "
                << result.detail << "\n";
      all_passed = all_passed && result.passed;
    };
    if (names.empty()) {
      for (const auto& result : vifix::run_all_checks(seed)) {
        run_one(result);
      }
    } else {
      for (const auto& name : names) {
        run_one(vifix::run_check(name, seed));
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "vifix: " << e.what() << "\n";
    return 1;
  }
  return all_passed ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "vifix: Halpern and hybrid steepest descent iterations for variational\n"
      "inequalities over common fixed-point sets of nonexpansive mappings"};
  app.require_subcommand(1);

  std::string scenario_path;
  vifix::RunOptions options;
  std::string scheme;
  double tol = -1.0;
  std::int64_t max_iter = -1;
  std::string out_dir = ".";
  std::string format = "csv";

  CLI::App* run = app.add_subcommand("run", "Run a scenario file and write trace + summary");
  run->add_option("file", scenario_path, "Scenario file (JSON)")->required();
  run->add_option("--scheme", scheme,
                  "Override the scheme (halpern, halpern_averaged, hsdm, wmap_hsdm, coupling)");
  run->add_option("--tol", tol, "Override tolerance.abs_tol");
  run->add_option("--max-iter", max_iter, "Override tolerance.max_iter");
  run->add_option("--out", out_dir, "Output directory for trace and summary files");
  run->add_option("--format", format, "Trace format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  run->add_flag("--require-conditions", options.require_conditions,
                "Refuse schedules/sequences whose by-construction flags do not "
                "certify the scheme's convergence theorem");

  std::vector<std::string> check_list;
  std::uint64_t seed = 12345;
  CLI::App* check = app.add_subcommand("check", "Run named invariant suites");
  check->add_option("names", check_list, "Check names (default: all)");
  check->add_option("--seed", seed, "RNG seed for the sampled suites");

  CLI::App* list = app.add_subcommand("list-checks", "List the runnable invariant suites");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    if (!scheme.empty()) {
      options.scheme_override = scheme;
    }
    if (tol >= 0.0) {
      options.tol_override = tol;
    }
    if (max_iter >= 1) {
      options.max_iter_override = static_cast<std::size_t>(max_iter);
    }
    options.out_dir = out_dir;
    options.trace_format = format;
    return cmd_run(scenario_path, options);
  }
  if (check->parsed()) {
    return cmd_check(check_list, seed);
  }
  if (list->parsed()) {
    std::cout << vifix::list_checks();
    return 0;
  }
  return 0;
}
