#pragma once

#include <string>
#include <vector>

#include "colsafe/barrier.hpp"

namespace colsafe {

enum class Topology { Tree, Clique, Custom };
std::string to_string(Topology t);

struct EdgeSpec {
    AgentId i = 0;
    AgentId j = 0;
    double k = 3.0;
    double R = 3.0;
    double b = 1.0;
};

struct AgentSpec {
    AgentState x;
    double mass = 0.5;
    Vec2 drive = Vec2::Zero();
};

struct Scenario {
    std::string name = "custom";
    Topology topology = Topology::Custom;
    std::vector<AgentSpec> agents;  // agent id = index
    std::vector<EdgeSpec> edges;
    std::vector<Obstacle> obstacles;
    double u_max = 20.0;          // |u_f - u_s|_inf bound, m/s^2
    double sensing_radius = 6.0;  // m
    double tau_interval = 0.01;   // s
    bool use_control_rate = false;
    ClassKGains gains;
    double dt = 0.01;
    double duration = 20.0;
    unsigned seed = 0;

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

/// Parses a JSON scenario document; missing optional fields get defaults.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);
std::string scenario_to_json(const Scenario& s);

/// Built-in layouts: tree7, clique8, clique8-dynamic, clique8-fast.
Scenario preset(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace colsafe
