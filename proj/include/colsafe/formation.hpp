#pragma once

#include <string>
#include <vector>

#include "colsafe/barrier.hpp"
#include "colsafe/polytope.hpp"

namespace colsafe {

struct Spring {
    AgentId i = 0;
    AgentId j = 0;
    double k = 3.0;  // N/m
    double R = 3.0;  // rest length, m
    double b = 1.0;  // N s/m, acts on the agent's own velocity
};

/// Undirected virtual mass-spring network. Agents are indexed 0..n-1.
class FormationGraph {
public:
    FormationGraph() = default;
    FormationGraph(std::vector<double> masses, std::vector<Spring> springs);

    std::size_t size() const { return mass_.size(); }
    double mass(AgentId i) const { return mass_.at(static_cast<std::size_t>(i)); }
    const std::vector<Spring>& springs() const { return springs_; }
    /// Ascending neighbor ids.
    const std::vector<AgentId>& neighbors(AgentId i) const { return adj_.at(static_cast<std::size_t>(i)); }
    /// Spring between i and j, oriented so that .i == i.
    Spring edge(AgentId i, AgentId j) const;
    std::size_t max_degree() const;
    bool is_tree() const;

private:
    std::vector<double> mass_;
    std::vector<Spring> springs_;
    std::vector<std::vector<AgentId>> adj_;
    std::vector<std::vector<std::size_t>> edge_index_;
};

struct ControlBounds {
    Polytope U;                   // acceleration set for u_f - u_s
    double sensing_radius = 6.0;  // m
    double tau_interval = 0.01;   // s
};

/// Spring-damper acceleration of agent i (no external drive).
Vec2 formation_control(AgentId i, const std::vector<AgentState>& x, const FormationGraph& graph);

/// Formation law plus per-agent constant drive.
struct FormationModel {
    FormationGraph graph;
    std::vector<Vec2> drive;  // empty = no drive

    Vec2 u_f(AgentId i, const std::vector<AgentState>& x) const;
    std::vector<Vec2> u_f_all(const std::vector<AgentState>& x) const;
};

/// Jacobians of agent i's formation acceleration, packaged for the barrier chain.
Neighborhood build_neighborhood(AgentId i, const std::vector<AgentState>& x, const std::vector<Vec2>& u_f,
                                const FormationGraph& graph);

/// Safety modifications u_s keeping u_f - u_s inside U and u_s itself inside
/// U. Falls back to {u_s : u_f - u_s in U} when the two do not meet.
Polytope safety_control_set(const Vec2& u_f, const Polytope& U);

/// Acceleration set equivalent to a velocity-change set over a window tau:
/// G (tau u) <= l, written with the offsets divided by tau.
Polytope velocity_to_accel(const Polytope& U_v, double tau_interval);

/// One first-order barrier row for the filter.
struct CbfRow {
    ObstacleId obstacle = 0;
    double distance = 0;  // |p - p_o|, used to order relaxation
    double Lf_phi1 = 0;
    RowVec2 Lg_phi1 = RowVec2::Zero();
    double phi1 = 0;
};

CbfRow cbf_row(const AgentState& x, const Vec2& u_f, const Obstacle& o, const ClassKGains& gains);

struct FilterResult {
    Vec2 u_s = Vec2::Zero();
    std::vector<ObstacleId> dropped;  // barrier rows given up, farthest first
    bool relaxed_set = false;         // collaborative set replaced by the fallback set
};

/// minimize 0.5 |u_s|^2  s.t.  Lg u_s <= Lf + alpha1 phi1 (each row),  u_s in U_bar.
/// If infeasible, retries in `fallback` and then drops barrier rows
/// farthest-obstacle-first.
FilterResult safety_filter(const std::vector<CbfRow>& rows, const Polytope& U_bar, const Polytope& fallback,
                           const ClassKGains& gains);

/// Classical RK4 on x' = [v; u_f(x) - u_s] with u_s held over the step.
std::vector<AgentState> step(const std::vector<AgentState>& x, const std::vector<Vec2>& u_s, double dt,
                             const FormationModel& model);

/// Obstacles advance by their own velocity.
void advance_obstacles(std::vector<Obstacle>& obstacles, double dt);

/// Kinetic plus spring potential energy.
double energy(const std::vector<AgentState>& x, const FormationGraph& graph);

}  // namespace colsafe
