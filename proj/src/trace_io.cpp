#include "vifix/trace_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <ostream>

#include <nlohmann/json.hpp>

namespace vifix {

namespace {

// Shortest representation that round-trips a double exactly.
std::string format_double(double v) {
  char buf[40];
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) {
      break;
    }
  }
  return buf;
}

}  // namespace

std::string termination_name(Termination t) {
  return t == Termination::tolerance ? "tolerance" : "max_iter";
}

void write_trace_csv(const IterationTrace& trace, std::ostream& out) {
  const std::size_t dim = trace.steps.empty() ? 0 : trace.steps.front().iterate.dim();
  out << "n,lambda_n,fix_residual,oracle_distance,coupling_diff";
  for (std::size_t i = 1; i <= dim; ++i) {
    out << ",x" << i;
  }
  out << "\n";
  for (const TraceStep& step : trace.steps) {
    out << step.n << ',' << format_double(step.lambda_n) << ','
        << format_double(step.fix_residual) << ',';
    if (step.oracle_distance) {
      out << format_double(*step.oracle_distance);
    }
    out << ',';
    if (step.coupling_diff) {
      out << format_double(*step.coupling_diff);
    }
    for (std::size_t i = 0; i < dim; ++i) {
      out << ',' << format_double(step.iterate[i]);
    }
    out << "\n";
  }
}

nlohmann::json vector_to_json(const Vector& v) {
  return nlohmann::json(v.coords());
}

Vector vector_from_json(const nlohmann::json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) {
    throw std::invalid_argument(field + ": expected a nonempty array of numbers");
  }
  std::vector<double> coords;
  coords.reserve(j.size());
  for (const auto& item : j) {
    if (!item.is_number()) {
      throw std::invalid_argument(field + ": expected a nonempty array of numbers");
    }
    coords.push_back(item.get<double>());
  }
  return Vector(std::move(coords));
}

nlohmann::json trace_to_json(const IterationTrace& trace) {
  nlohmann::json steps = nlohmann::json::array();
  for (const TraceStep& step : trace.steps) {
    nlohmann::json record{
        {"n", step.n},
        {"lambda_n", step.lambda_n},
        {"fix_residual", step.fix_residual},
        {"oracle_distance",
         step.oracle_distance ? nlohmann::json(*step.oracle_distance) : nlohmann::json()},
        {"coupling_diff",
         step.coupling_diff ? nlohmann::json(*step.coupling_diff) : nlohmann::json()},
        {"iterate", vector_to_json(step.iterate)},
    };
    steps.push_back(std::move(record));
  }
  return nlohmann::json{
      {"scheme", trace.scheme},
      {"terminated_by", termination_name(trace.terminated_by)},
      {"steps", std::move(steps)},
  };
}

void write_trace_json(const IterationTrace& trace, std::ostream& out) {
  out << trace_to_json(trace).dump(2) << "\n";
}

nlohmann::json oracle_result_to_json(const OracleResult& result) {
  return nlohmann::json{
      {"solution", vector_to_json(result.solution)},
      {"iterations_used", result.iterations_used},
      {"final_step_norm", result.final_step_norm},
      {"certified_rate", result.certified_rate},
  };
}

}  // namespace vifix
