#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "colsafe/negotiation.hpp"
#include "colsafe/simulation.hpp"

namespace colsafe::verify {

struct CheckResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
};

// Independent oracles. These use brute force or numerical differentiation and
// never call the routine they are checking for the reference value.

/// max over a 0.1 grid of the box of min_k [B u]_k.
double grid_max_min(const Mat& B, const Vec& lower, const Vec& upper, double step);

/// Distance between two convex polygons given by counter-clockwise vertices,
/// from discretized boundaries (coarse sweep, then a local fine sweep).
double boundary_distance(const std::vector<Vec2>& P, const std::vector<Vec2>& Q);

/// Best value of min_i Phi_i over a uniform grid on every agent's box. The
/// snapshot agents must all use boxes for U.
double grid_joint_margin(const NetworkSnapshot& net, double step);

// Acceptance checks, in run order.
CheckResult tree_scenario();            // 1
CheckResult clique_scenario();          // 2
CheckResult max_min_equivalence();      // 3
CheckResult closest_point_oracle();     // 4
CheckResult lie_chain_consistency();    // 5
CheckResult protocol_algebra();         // 6
CheckResult terminal_infeasibility();   // 7
CheckResult determinism();              // 8
CheckResult dynamic_obstacles();        // 9

/// The engineered three-agent tree whose requests cannot be met jointly.
NetworkSnapshot infeasible_tree_fixture();

/// Runs every criterion, prints one PASS/FAIL line each, returns the results.
std::vector<CheckResult> run_all(std::ostream& os);

}  // namespace colsafe::verify
