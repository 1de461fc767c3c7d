#pragma once

#include <limits>
#include <string>
#include <vector>

#include "colsafe/formation.hpp"
#include "colsafe/negotiation.hpp"
#include "colsafe/scenario.hpp"

namespace colsafe {

struct AgentRecord {
    AgentId agent = 0;
    AgentState x;
    Vec2 u_f = Vec2::Zero();
    Vec2 u_s = Vec2::Zero();
};

struct BarrierRecord {
    AgentId agent = 0;
    ObstacleId obstacle = 0;
    double h = 0;
    double phi1 = 0;
};

struct StepRecord {
    double t = 0;
    std::vector<AgentRecord> agents;
    std::vector<BarrierRecord> barriers;  // pairs inside the sensing radius
    int tau = 0;
    int upsilon = 0;
    ProtocolStatus status = ProtocolStatus::Converged;
};

struct MessageLine {
    double t = 0;
    MessageRecord msg;
};

struct TraceLog {
    std::vector<StepRecord> steps;
    std::vector<MessageLine> messages;
    std::vector<std::string> diagnostics;  // "t=...: ..." lines
};

FormationModel make_model(const Scenario& scenario);

/// Everything the protocol and the filters need for one control step.
struct StepProblem {
    std::vector<Vec2> u_f;
    std::vector<std::vector<Obstacle>> active;  // sensed obstacles per agent
    std::vector<Polytope> U_s;                  // admissible safety modifications
    NetworkSnapshot net;
};

/// `du` holds the control-rate estimate per agent, or is empty to omit it.
StepProblem build_step_problem(const Scenario& scenario, const FormationModel& model,
                               const std::vector<AgentState>& x, const std::vector<Obstacle>& obstacles,
                               const std::vector<Vec2>& du);

struct RunOptions {
    EngineOptions engine;
    bool record_messages = true;
};

/// Simulates the scenario with the collaborative safety protocol in the loop.
/// Solver failures are rethrown as SolverError carrying the step index.
TraceLog run(const Scenario& scenario, const RunOptions& opts = {});

struct Summary {
    std::size_t steps = 0;
    double min_h = std::numeric_limits<double>::infinity();
    int max_tau = 0;
    double mean_tau = 0;
    int terminally_infeasible_steps = 0;
    int round_cap_steps = 0;
    std::vector<double> max_us_norm;  // per agent
    std::size_t negative_h_records = 0;
    bool tree = false;
    std::size_t max_degree = 0;
    bool theorem2_pass = true;  // only meaningful for tree scenarios
};

Summary summarize(const TraceLog& log, const Scenario& scenario);
std::string summary_to_json(const Summary& s);

}  // namespace colsafe
