#pragma once

#include <json.hpp>

#include <iosfwd>
#include <string>

#include "hyperflow/solver.hpp"
#include "hyperflow/triangulation.hpp"

// Structured-text views of the core objects. All floating-point values are
// rendered with enough digits to reparse to the identical double, and every
// field is deterministic (wall-clock timing stays out of the serialized
// reports so identical runs produce identical bytes).

namespace hyperflow::io {

// Shortest-faithful rendering: %.17g always round-trips a double.
std::string format_double(double value);

nlohmann::ordered_json to_json(const ValidationReport& report);
nlohmann::ordered_json to_json(const Triangulation& tri);
nlohmann::ordered_json to_json(const SolveReport& report);

// One row per recorded sample: t, l_e0..l_eN, Knorm, energy.
void write_trace_csv(std::ostream& out, const FlowTrace& trace, int num_edges);
// Sidecar: t, event, index.
void write_events_csv(std::ostream& out, const FlowTrace& trace);

}  // namespace hyperflow::io
