#pragma once

#include <string>
#include <vector>

#include "colsafe/simulation.hpp"

namespace colsafe {

/// Writes trajectory.csv, barrier.csv, rounds.csv, messages.ndjson,
/// diagnostics.txt, scenario.json and summary.json. Throws std::runtime_error on IO failure.
void emit_traces(const TraceLog& log, const Scenario& scenario, const std::string& out_dir);

struct LoadedTrace {
    Scenario scenario;
    TraceLog log;  // messages are not reloaded
};

/// Reads back a directory written by emit_traces.
LoadedTrace read_traces(const std::string& dir);

/// Trajectory, safety-control and round-count figures as SVG. Returns the
/// files written; an empty log writes nothing.
std::vector<std::string> emit_plots(const TraceLog& log, const Scenario& scenario, const std::string& out_dir);

std::string message_to_json_line(const MessageLine& m);

}  // namespace colsafe
