#pragma once

#include <iosfwd>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "vifix/oracle.hpp"
#include "vifix/solvers.hpp"

namespace vifix {

/// Writes the trace as CSV with the fixed column layout
/// n,lambda_n,fix_residual,oracle_distance,coupling_diff,x1..xd
/// (optional fields stay empty). Numbers use shortest round-trip formatting,
/// so identical traces serialize to identical bytes.
void write_trace_csv(const IterationTrace& trace, std::ostream& out);

/// Same records as a JSON document {scheme, terminated_by, steps:[...]}.
nlohmann::json trace_to_json(const IterationTrace& trace);
void write_trace_json(const IterationTrace& trace, std::ostream& out);

nlohmann::json vector_to_json(const Vector& v);
Vector vector_from_json(const nlohmann::json& j, const std::string& field);

nlohmann::json oracle_result_to_json(const OracleResult& result);

std::string termination_name(Termination t);

}  // namespace vifix
