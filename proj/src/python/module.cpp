#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <random>
#include <sstream>

#include "vifix/checks.hpp"
#include "vifix/oracle.hpp"
#include "vifix/scenario.hpp"
#include "vifix/solvers.hpp"
#include "vifix/trace_io.hpp"

namespace py = pybind11;
using namespace vifix;

#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)

namespace {

std::string vector_repr(const Vector& v) {
  std::ostringstream out;
  out << "Vector([";
  for (std::size_t i = 0; i < v.dim(); ++i) {
    out << (i ? ", " : "") << v[i];
  }
  out << "])";
  return out.str();
}

Region make_region(const Vector& center, double radius) { return Region(center, radius); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Halpern and hybrid steepest descent iterations for variational "
      "inequalities over common fixed-point sets of nonexpansive mappings";

  py::register_exception<ScenarioError>(m, "ScenarioError", PyExc_ValueError);
  py::register_exception<DimensionMismatch>(m, "DimensionMismatchError", PyExc_ValueError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

  // --- space ---------------------------------------------------------------
  py::class_<Vector>(m, "Vector")
      .def(py::init<std::vector<double>>(), py::arg("coords"))
      .def_static("zero", &Vector::zero, py::arg("dim"))
      .def_static("unit", &Vector::unit, py::arg("dim"), py::arg("i"))
      .def_property_readonly("dim", &Vector::dim)
      .def("tolist", [](const Vector& v) { return v.coords(); })
      .def("__len__", &Vector::dim)
      .def("__getitem__",
           [](const Vector& v, std::size_t i) {
             if (i >= v.dim()) throw py::index_error();
             return v[i];
           })
      .def("__eq__", [](const Vector& a, const Vector& b) { return a == b; })
      .def("__repr__", &vector_repr);
  py::implicitly_convertible<py::list, Vector>();
  py::implicitly_convertible<py::tuple, Vector>();

  py::class_<Tolerance>(m, "Tolerance")
      .def(py::init<double, double, std::size_t>(), py::arg("abs_tol") = 1e-3,
           py::arg("rel_tol") = 0.0, py::arg("max_iter") = 200000)
      .def_readonly("abs_tol", &Tolerance::abs_tol)
      .def_readonly("rel_tol", &Tolerance::rel_tol)
      .def_readonly("max_iter", &Tolerance::max_iter);

  m.def("inner", &inner, py::arg("x"), py::arg("y"));
  m.def("norm", &norm, py::arg("x"));
  m.def("distance", &distance, py::arg("x"), py::arg("y"));
  m.def("combine", &combine, py::arg("alpha"), py::arg("x"), py::arg("beta"), py::arg("y"));
  m.def("scale", &scale, py::arg("alpha"), py::arg("x"));

  py::class_<Region>(m, "Region")
      .def(py::init(&make_region), py::arg("center"), py::arg("radius"))
      .def_readonly("center", &Region::center)
      .def_readonly("radius", &Region::radius);

  // --- sets ------------------------------------------------------------------
  py::class_<ConvexSet> convex_set(m, "ConvexSet");
  py::enum_<ConvexSet::Kind>(convex_set, "Kind")
      .value("halfspace", ConvexSet::Kind::halfspace)
      .value("ball", ConvexSet::Kind::ball)
      .value("box", ConvexSet::Kind::box)
      .value("affine", ConvexSet::Kind::affine)
      .value("intersection", ConvexSet::Kind::intersection);
  convex_set
      .def_static("halfspace", &ConvexSet::halfspace, py::arg("normal"), py::arg("offset"))
      .def_static("ball", &ConvexSet::ball, py::arg("center"), py::arg("radius"))
      .def_static("box", &ConvexSet::box, py::arg("lo"), py::arg("hi"))
      .def_static("affine", &ConvexSet::affine, py::arg("point"), py::arg("directions"))
      .def_static("intersection", &ConvexSet::intersection, py::arg("members"),
                  py::arg("witness"))
      .def_static("whole_space", &ConvexSet::whole_space, py::arg("dim"))
      .def_property_readonly("kind", &ConvexSet::kind)
      .def_property_readonly("dim", &ConvexSet::dim)
      .def("witness_point", &ConvexSet::witness_point);

  m.def("project", &project, py::arg("set"), py::arg("x"),
        py::arg("tol") = Tolerance(1e-12, 0.0, 100000));
  m.def("contains", &contains, py::arg("set"), py::arg("x"), py::arg("slack"));
  m.def("distance_to", &distance_to, py::arg("set"), py::arg("x"));
  m.def(
      "sample_point",
      [](const ConvexSet& set, std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        return sample_point(set, rng);
      },
      py::arg("set"), py::arg("seed"));

  py::class_<ProjectionViReport>(m, "ProjectionViReport")
      .def_readonly("max_violation", &ProjectionViReport::max_violation)
      .def_readonly("worst_point", &ProjectionViReport::worst_point);
  m.def(
      "check_projection_vi",
      [](const ConvexSet& set, const Vector& x, const Vector& z, std::size_t sample_count,
         std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        return check_projection_vi(set, x, z, sample_count, rng);
      },
      py::arg("set"), py::arg("x"), py::arg("z"), py::arg("sample_count") = 1000,
      py::arg("seed") = 0);

  // --- mappings --------------------------------------------------------------
  py::class_<NonexpansiveMap>(m, "NonexpansiveMap")
      .def_static("identity", &NonexpansiveMap::identity, py::arg("dim"))
      .def_static("projection", &NonexpansiveMap::projection, py::arg("set"),
                  py::arg("proj_tol") = Tolerance(1e-12, 0.0, 100000))
      .def_static("averaged", &NonexpansiveMap::averaged, py::arg("alpha"), py::arg("inner"))
      .def_static("composition", &NonexpansiveMap::composition, py::arg("maps"))
      .def_static("convex_combination", &NonexpansiveMap::convex_combination,
                  py::arg("weights"), py::arg("maps"))
      .def_static("w_mapping", &NonexpansiveMap::w_mapping, py::arg("maps"),
                  py::arg("gammas"))
      .def_property_readonly("dim", &NonexpansiveMap::dim)
      .def("__call__", &NonexpansiveMap::operator())
      .def("apply", &NonexpansiveMap::operator());
  m.def("apply", &apply, py::arg("map"), py::arg("x"));
  m.def("build_w_mapping", &build_w_mapping, py::arg("maps"), py::arg("gammas"));

  py::class_<SequenceFlags>(m, "SequenceFlags")
      .def(py::init([](bool z, bool aktt, bool r) {
             return SequenceFlags{z, aktt, r};
           }),
           py::arg("condition_z") = false, py::arg("condition_aktt") = false,
           py::arg("condition_r") = false)
      .def_readonly("condition_z", &SequenceFlags::condition_z)
      .def_readonly("condition_aktt", &SequenceFlags::condition_aktt)
      .def_readonly("condition_r", &SequenceFlags::condition_r);

  py::class_<MapSequence>(m, "MapSequence")
      .def_static("constant", &MapSequence::constant, py::arg("map"), py::arg("fixed_set"))
      .def_static("cyclic", &MapSequence::cyclic, py::arg("maps"), py::arg("fixed_set"))
      .def_static(
          "w_mapping_family",
          [](std::vector<NonexpansiveMap> base, double gamma, ConvexSet fixed_set) {
            return MapSequence::w_mapping_family(std::move(base), gamma,
                                                 std::move(fixed_set));
          },
          py::arg("base"), py::arg("gamma"), py::arg("fixed_set"))
      .def_static("from_generator", &MapSequence::from_generator, py::arg("generator"),
                  py::arg("fixed_set"), py::arg("flags"))
      .def("map_at", &MapSequence::map_at, py::arg("n"))
      .def_property_readonly("common_fixed_set", &MapSequence::common_fixed_set)
      .def_property_readonly("flags", &MapSequence::flags)
      .def_property_readonly("dim", &MapSequence::dim);

  m.def(
      "estimate_sup_diff",
      [](const MapSequence& seq, std::size_t n, const Region& region,
         std::size_t sample_count, std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        return estimate_sup_diff(seq, n, region, sample_count, rng);
      },
      py::arg("seq"), py::arg("n"), py::arg("region"), py::arg("sample_count") = 1000,
      py::arg("seed") = 0);
  m.def(
      "empirical_nonexpansiveness",
      [](const NonexpansiveMap& map, std::size_t pair_count, const Region& region,
         std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        return empirical_nonexpansiveness(map, pair_count, region, rng);
      },
      py::arg("map"), py::arg("pair_count"), py::arg("region"), py::arg("seed") = 0);

  // --- operators ---------------------------------------------------------------
  py::class_<MonotoneOperator>(m, "MonotoneOperator")
      .def_static("translation", &MonotoneOperator::translation, py::arg("u"))
      .def_static("affine", &MonotoneOperator::affine, py::arg("rows"), py::arg("b"))
      .def_static("affine_with_declared_constants",
                  &MonotoneOperator::affine_with_declared_constants, py::arg("rows"),
                  py::arg("b"), py::arg("kappa"), py::arg("eta"))
      .def_property_readonly("dim", &MonotoneOperator::dim)
      .def_property_readonly("kappa", &MonotoneOperator::kappa)
      .def_property_readonly("eta", &MonotoneOperator::eta)
      .def("__call__", &MonotoneOperator::operator());
  m.def("evaluate", &evaluate, py::arg("A"), py::arg("x"));
  m.def("theta", &theta, py::arg("A"));
  m.def("rescale", &rescale, py::arg("A"), py::arg("mu"));

  py::class_<ConstantsReport>(m, "ConstantsReport")
      .def_readonly("min_monotonicity_ratio", &ConstantsReport::min_monotonicity_ratio)
      .def_readonly("max_lipschitz_ratio", &ConstantsReport::max_lipschitz_ratio)
      .def_readonly("max_contraction_ratio", &ConstantsReport::max_contraction_ratio)
      .def_readonly("passed", &ConstantsReport::passed);
  m.def(
      "verify_constants",
      [](const MonotoneOperator& a, std::size_t pair_count, const Region& region,
         std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        return verify_constants(a, pair_count, region, rng);
      },
      py::arg("A"), py::arg("pair_count"), py::arg("region"), py::arg("seed") = 0);

  // --- solvers ------------------------------------------------------------------
  py::class_<StepSchedule> schedule(m, "StepSchedule");
  py::class_<StepSchedule::Flags>(schedule, "Flags")
      .def_readonly("vanishes", &StepSchedule::Flags::vanishes)
      .def_readonly("divergent_sum", &StepSchedule::Flags::divergent_sum)
      .def_readonly("summable_differences", &StepSchedule::Flags::summable_differences);
  schedule.def_static("harmonic", &StepSchedule::harmonic)
      .def_static("power", &StepSchedule::power, py::arg("p"))
      .def_static("constant", &StepSchedule::constant, py::arg("c"))
      .def("lambda_at", &StepSchedule::lambda, py::arg("n"))
      .def_property_readonly("flags", &StepSchedule::flags);
  m.def("make_schedule", &make_schedule, py::arg("kind"), py::arg("param") = 0.0);

  py::class_<AveragingSchedule> averaging(m, "AveragingSchedule");
  py::class_<AveragingSchedule::Flags>(averaging, "Flags")
      .def_readonly("liminf_positive", &AveragingSchedule::Flags::liminf_positive)
      .def_readonly("limsup_below_one", &AveragingSchedule::Flags::limsup_below_one);
  averaging.def_static("constant", &AveragingSchedule::constant, py::arg("beta"))
      .def("beta_at", &AveragingSchedule::beta, py::arg("n"))
      .def_property_readonly("flags", &AveragingSchedule::flags);

  py::enum_<Termination>(m, "Termination")
      .value("tolerance", Termination::tolerance)
      .value("max_iter", Termination::max_iter);

  py::class_<TraceStep>(m, "TraceStep")
      .def_readonly("n", &TraceStep::n)
      .def_readonly("lambda_n", &TraceStep::lambda_n)
      .def_readonly("iterate", &TraceStep::iterate)
      .def_readonly("fix_residual", &TraceStep::fix_residual)
      .def_readonly("oracle_distance", &TraceStep::oracle_distance)
      .def_readonly("coupling_diff", &TraceStep::coupling_diff);

  py::class_<IterationTrace>(m, "IterationTrace")
      .def_readonly("scheme", &IterationTrace::scheme)
      .def_readonly("steps", &IterationTrace::steps)
      .def_readonly("terminated_by", &IterationTrace::terminated_by)
      .def("final_step", &IterationTrace::final_step,
           py::return_value_policy::reference_internal)
      .def("to_csv",
           [](const IterationTrace& trace) {
             std::ostringstream out;
             write_trace_csv(trace, out);
             return out.str();
           })
      .def("__len__", [](const IterationTrace& t) { return t.steps.size(); });

  m.def("halpern_iterate", &halpern_iterate, py::arg("seq"), py::arg("u"), py::arg("x1"),
        py::arg("schedule"), py::arg("tol"), py::arg("oracle") = std::nullopt);
  m.def("halpern_averaged_iterate", &halpern_averaged_iterate, py::arg("seq"),
        py::arg("u"), py::arg("x1"), py::arg("schedule"), py::arg("beta"), py::arg("tol"),
        py::arg("oracle") = std::nullopt);
  m.def("hsdm_iterate", &hsdm_iterate, py::arg("seq"), py::arg("A"), py::arg("y1"),
        py::arg("schedule"), py::arg("tol"), py::arg("oracle") = std::nullopt);
  m.def("wmap_hsdm_iterate", &wmap_hsdm_iterate, py::arg("base_maps"), py::arg("gammas"),
        py::arg("A"), py::arg("y1"), py::arg("schedule"), py::arg("tol"),
        py::arg("oracle") = std::nullopt);

  py::class_<CouplingResult>(m, "CouplingResult")
      .def_readonly("trace_x", &CouplingResult::trace_x)
      .def_readonly("trace_y", &CouplingResult::trace_y)
      .def_readonly("coupling_diffs", &CouplingResult::coupling_diffs)
      .def_readonly("vi_solution", &CouplingResult::vi_solution)
      .def_readonly("anchor", &CouplingResult::anchor)
      .def_readonly("contraction_rate", &CouplingResult::contraction_rate);
  m.def("coupling_experiment", &coupling_experiment, py::arg("seq"), py::arg("A"),
        py::arg("y1"), py::arg("schedule"), py::arg("tol"));

  py::class_<SequenceLemmaReport>(m, "SequenceLemmaReport")
      .def_readonly("recursion_satisfied", &SequenceLemmaReport::recursion_satisfied)
      .def_readonly("tail_max", &SequenceLemmaReport::tail_max)
      .def_readonly("tail_within_tol", &SequenceLemmaReport::tail_within_tol);
  m.def("check_sequence_lemma", &check_sequence_lemma, py::arg("epsilons"),
        py::arg("gammas"), py::arg("lambdas"), py::arg("tail_tol"));

  // --- oracle -------------------------------------------------------------------
  py::class_<OracleResult>(m, "OracleResult")
      .def_readonly("solution", &OracleResult::solution)
      .def_readonly("iterations_used", &OracleResult::iterations_used)
      .def_readonly("final_step_norm", &OracleResult::final_step_norm)
      .def_readonly("certified_rate", &OracleResult::certified_rate)
      .def_readonly("step_norms", &OracleResult::step_norms);
  m.def("solve_vi_banach",
        py::overload_cast<const ConvexSet&, const MonotoneOperator&, const Tolerance&>(
            &solve_vi_banach),
        py::arg("F"), py::arg("A"), py::arg("tol"));
  m.def("solve_vi_banach",
        py::overload_cast<const ConvexSet&, const MonotoneOperator&, const Tolerance&,
                          const Vector&>(&solve_vi_banach),
        py::arg("F"), py::arg("A"), py::arg("tol"), py::arg("start"));
  m.def("halpern_limit_oracle", &halpern_limit_oracle, py::arg("F"), py::arg("u"),
        py::arg("tol"));
  m.def("vi_residual", &vi_residual, py::arg("F"), py::arg("A"), py::arg("z"),
        py::arg("tol"));

  // --- cli / scenario -------------------------------------------------------------
  m.def(
      "run_scenario",
      [](const std::filesystem::path& path, const std::filesystem::path& out_dir,
         const std::string& trace_format, bool require_conditions,
         const std::optional<std::string>& scheme, const std::optional<double>& tol,
         const std::optional<std::size_t>& max_iter) {
        RunOptions options;
        options.out_dir = out_dir;
        options.trace_format = trace_format;
        options.require_conditions = require_conditions;
        options.scheme_override = scheme;
        options.tol_override = tol;
        options.max_iter_override = max_iter;
        const RunReport report = run_scenario(path, options);
        py::dict result;
        result["exit_code"] = report.exit_code;
        result["summary"] =
            py::module_::import("json").attr("loads")(report.summary.dump());
        result["trace_path"] = report.trace_path;
        result["summary_path"] = report.summary_path;
        return result;
      },
      py::arg("path"), py::arg("out_dir") = ".", py::arg("trace_format") = "csv",
      py::arg("require_conditions") = false, py::arg("scheme") = std::nullopt,
      py::arg("tol") = std::nullopt, py::arg("max_iter") = std::nullopt);

  py::class_<CheckResult>(m, "CheckResult")
      .def_readonly("name", &CheckResult::name)
      .def_readonly("passed", &CheckResult::passed)
      .def_readonly("detail", &CheckResult::detail);
  m.def("check_names", &check_names);
  m.def("list_checks", &list_checks);
  m.def("run_check", &run_check, py::arg("name"), py::arg("seed") = 12345);
  m.def("run_all_checks", &run_all_checks, py::arg("seed") = 12345);

#ifdef VERSION_INFO
  m.attr("__version__") = MACRO_STRINGIFY(VERSION_INFO);
#else
  m.attr("__version__") = "dev";
#endif
}
