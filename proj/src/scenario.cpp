#include "colsafe/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "colsafe/errors.hpp"
#include "colsafe/formation.hpp"

namespace colsafe {

using nlohmann::json;

std::string to_string(Topology t) {
    switch (t) {
        case Topology::Tree: return "tree";
        case Topology::Clique: return "clique";
        case Topology::Custom: return "custom";
    }
    return "custom";
}

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& why) {
    throw ConfigError(field + ": " + why);
}

void require_positive(double v, const std::string& field) {
    if (!(v > 0) || !std::isfinite(v)) bad(field, "must be positive and finite");
}

Vec2 read_vec2(const json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        bad(field, "expected an array of two numbers");
    return Vec2(j[0].get<double>(), j[1].get<double>());
}

template <class T>
T read_or(const json& obj, const char* key, T fallback, const std::string& field) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        bad(field + "." + key, "wrong type");
    }
}

json vec_json(const Vec2& v) { return json::array({v.x(), v.y()}); }

}  // namespace

void Scenario::validate() const {
    require_positive(dt, "dt");
    if (!(duration >= 0) || !std::isfinite(duration)) bad("duration", "must be nonnegative");
    require_positive(u_max, "control.u_max");
    require_positive(sensing_radius, "control.sensing_radius");
    require_positive(tau_interval, "control.tau_interval");
    require_positive(gains.alpha0, "gains.alpha0");
    require_positive(gains.alpha1, "gains.alpha1");
    require_positive(gains.alpha2, "gains.alpha2");
    if (agents.empty()) bad("agents", "at least one agent required");
    const auto n = static_cast<AgentId>(agents.size());
    for (std::size_t i = 0; i < agents.size(); ++i) {
        const std::string f = "agents[" + std::to_string(i) + "]";
        require_positive(agents[i].mass, f + ".mass");
        if (!agents[i].x.p.allFinite() || !agents[i].x.v.allFinite()) bad(f, "state must be finite");
    }
    std::set<std::pair<AgentId, AgentId>> seen;
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const EdgeSpec& s = edges[e];
        const std::string f = "edges[" + std::to_string(e) + "]";
        if (s.i < 0 || s.j < 0 || s.i >= n || s.j >= n || s.i == s.j) bad(f, "endpoints must be distinct agent ids");
        if (!seen.insert({std::min(s.i, s.j), std::max(s.i, s.j)}).second) bad(f, "duplicate edge");
        require_positive(s.k, f + ".k");
        require_positive(s.R, f + ".R");
        if (!(s.b >= 0)) bad(f + ".b", "must be nonnegative");
    }
    std::set<ObstacleId> ids;
    for (std::size_t k = 0; k < obstacles.size(); ++k) {
        const std::string f = "obstacles[" + std::to_string(k) + "]";
        require_positive(obstacles[k].r, f + ".r");
        if (!ids.insert(obstacles[k].id).second) bad(f + ".id", "duplicate obstacle id");
    }
    if (topology == Topology::Tree) {
        std::vector<double> m(agents.size(), 1.0);
        std::vector<Spring> sp;
        for (const auto& s : edges) sp.push_back({s.i, s.j, s.k, s.R, s.b});
        if (!FormationGraph(m, sp).is_tree()) bad("topology", "tagged tree but the edge set is not an acyclic connected graph");
    }
    if (topology == Topology::Clique) {
        const std::size_t full = agents.size() * (agents.size() - 1) / 2;
        if (edges.size() != full) bad("topology", "tagged clique but the graph is not complete");
    }
}

Scenario parse_scenario(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("scenario: malformed document: ") + e.what());
    }
    if (!doc.is_object()) bad("scenario", "top level must be an object");

    Scenario s;
    s.name = read_or<std::string>(doc, "name", s.name, "scenario");
    const std::string topo = read_or<std::string>(doc, "topology", "custom", "scenario");
    if (topo == "tree") s.topology = Topology::Tree;
    else if (topo == "clique") s.topology = Topology::Clique;
    else if (topo == "custom") s.topology = Topology::Custom;
    else bad("topology", "expected tree, clique or custom");
    s.dt = read_or<double>(doc, "dt", s.dt, "scenario");
    s.duration = read_or<double>(doc, "duration", s.duration, "scenario");
    s.seed = read_or<unsigned>(doc, "seed", s.seed, "scenario");

    const json physics = doc.value("physics", json::object());
    const double mass = read_or<double>(physics, "mass", 0.5, "physics");
    const double k = read_or<double>(physics, "k", 3.0, "physics");
    const double R = read_or<double>(physics, "R", 3.0, "physics");
    const double b = read_or<double>(physics, "b", 1.0, "physics");

    const json control = doc.value("control", json::object());
    s.u_max = read_or<double>(control, "u_max", s.u_max, "control");
    s.sensing_radius = read_or<double>(control, "sensing_radius", s.sensing_radius, "control");
    s.tau_interval = read_or<double>(control, "tau_interval", s.tau_interval, "control");
    s.use_control_rate = read_or<bool>(control, "use_control_rate", s.use_control_rate, "control");

    const json gains = doc.value("gains", json::object());
    s.gains.alpha0 = read_or<double>(gains, "alpha0", 1.0, "gains");
    s.gains.alpha1 = read_or<double>(gains, "alpha1", 1.0, "gains");
    s.gains.alpha2 = read_or<double>(gains, "alpha2", 1.0, "gains");

    Vec2 drive = Vec2::Zero();
    if (doc.contains("drive")) drive = read_vec2(doc["drive"], "drive");

    if (!doc.contains("agents") || !doc["agents"].is_array()) bad("agents", "required array");
    for (std::size_t i = 0; i < doc["agents"].size(); ++i) {
        const json& a = doc["agents"][i];
        const std::string f = "agents[" + std::to_string(i) + "]";
        if (!a.is_object() || !a.contains("p")) bad(f + ".p", "required");
        AgentSpec spec;
        spec.x.p = read_vec2(a["p"], f + ".p");
        if (a.contains("v")) spec.x.v = read_vec2(a["v"], f + ".v");
        spec.mass = read_or<double>(a, "mass", mass, f);
        spec.drive = a.contains("drive") ? read_vec2(a["drive"], f + ".drive") : drive;
        s.agents.push_back(spec);
    }

    if (doc.contains("edges")) {
        if (!doc["edges"].is_array()) bad("edges", "expected an array");
        for (std::size_t e = 0; e < doc["edges"].size(); ++e) {
            const json& j = doc["edges"][e];
            const std::string f = "edges[" + std::to_string(e) + "]";
            EdgeSpec es{0, 0, k, R, b};
            if (j.is_array() && j.size() == 2 && j[0].is_number_integer() && j[1].is_number_integer()) {
                es.i = j[0].get<AgentId>();
                es.j = j[1].get<AgentId>();
            } else if (j.is_object() && j.contains("i") && j.contains("j")) {
                es.i = read_or<AgentId>(j, "i", 0, f);
                es.j = read_or<AgentId>(j, "j", 0, f);
                es.k = read_or<double>(j, "k", k, f);
                es.R = read_or<double>(j, "R", R, f);
                es.b = read_or<double>(j, "b", b, f);
            } else {
                bad(f, "expected [i, j] or {i, j, k, R, b}");
            }
            s.edges.push_back(es);
        }
    }

    if (doc.contains("obstacles")) {
        if (!doc["obstacles"].is_array()) bad("obstacles", "expected an array");
        for (std::size_t k2 = 0; k2 < doc["obstacles"].size(); ++k2) {
            const json& o = doc["obstacles"][k2];
            const std::string f = "obstacles[" + std::to_string(k2) + "]";
            if (!o.is_object() || !o.contains("p")) bad(f + ".p", "required");
            Obstacle ob;
            ob.id = read_or<ObstacleId>(o, "id", static_cast<ObstacleId>(k2), f);
            ob.p = read_vec2(o["p"], f + ".p");
            if (o.contains("v")) ob.v = read_vec2(o["v"], f + ".v");
            ob.r = read_or<double>(o, "r", 1.0, f);
            s.obstacles.push_back(ob);
        }
    }
    s.validate();
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("scenario: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

std::string scenario_to_json(const Scenario& s) {
    json doc;
    doc["name"] = s.name;
    doc["topology"] = to_string(s.topology);
    doc["dt"] = s.dt;
    doc["duration"] = s.duration;
    doc["seed"] = s.seed;
    doc["control"] = {{"u_max", s.u_max},
                      {"sensing_radius", s.sensing_radius},
                      {"tau_interval", s.tau_interval},
                      {"use_control_rate", s.use_control_rate}};
    doc["gains"] = {{"alpha0", s.gains.alpha0}, {"alpha1", s.gains.alpha1}, {"alpha2", s.gains.alpha2}};
    doc["agents"] = json::array();
    for (const auto& a : s.agents)
        doc["agents"].push_back({{"p", vec_json(a.x.p)}, {"v", vec_json(a.x.v)}, {"mass", a.mass}, {"drive", vec_json(a.drive)}});
    doc["edges"] = json::array();
    for (const auto& e : s.edges) doc["edges"].push_back({{"i", e.i}, {"j", e.j}, {"k", e.k}, {"R", e.R}, {"b", e.b}});
    doc["obstacles"] = json::array();
    for (const auto& o : s.obstacles)
        doc["obstacles"].push_back({{"id", o.id}, {"p", vec_json(o.p)}, {"v", vec_json(o.v)}, {"r", o.r}});
    return doc.dump(2) + "\n";
}

namespace {

Scenario base(const std::string& name, Topology t) {
    Scenario s;
    s.name = name;
    s.topology = t;
    return s;
}

void add_agent(Scenario& s, double x, double y) {
    AgentSpec a;
    a.x.p = Vec2(x, y);
    a.drive = Vec2(5.0, 0.0);
    s.agents.push_back(a);
}

Scenario tree7() {
    Scenario s = base("tree7", Topology::Tree);
    // balanced binary tree on a 3 m grid, root in the middle
    add_agent(s, 0, 0);
    add_agent(s, 0, 3);
    add_agent(s, 0, -3);
    add_agent(s, -3, 3);
    add_agent(s, 0, 6);
    add_agent(s, -3, -3);
    add_agent(s, 0, -6);
    for (auto [i, j] : std::vector<std::pair<int, int>>{{0, 1}, {0, 2}, {1, 3}, {1, 4}, {2, 5}, {2, 6}})
        s.edges.push_back({i, j, 3.0, 3.0, 1.0});
    s.obstacles.push_back({0, Vec2(14.0, 0.4), Vec2::Zero(), 1.0});
    s.duration = 20.0;
    return s;
}

Scenario clique8(const std::string& name, const Vec2& obstacle_velocity, double obstacle_x) {
    Scenario s = base(name, Topology::Clique);
    // octagon radius at which the spring forces of the complete graph balance for R = 3
    const double radius = 1.885252309547193;
    for (int i = 0; i < 8; ++i) {
        const double a = 2.0 * M_PI * i / 8.0;
        add_agent(s, radius * std::cos(a), radius * std::sin(a));
    }
    for (int i = 0; i < 8; ++i)
        for (int j = i + 1; j < 8; ++j) s.edges.push_back({i, j, 3.0, 3.0, 1.0});
    for (int k = 0; k < 3; ++k)
        s.obstacles.push_back({k, Vec2(obstacle_x, -6.0 + 6.0 * k + 0.3), obstacle_velocity, 1.0});
    // the damped clique cruises at about 0.36 m/s, so the field is reached near t = 10 s
    s.duration = 40.0;
    return s;
}

}  // namespace

std::vector<std::string> preset_names() { return {"tree7", "clique8", "clique8-dynamic", "clique8-fast"}; }

Scenario preset(const std::string& name) {
    Scenario s;
    if (name == "tree7") s = tree7();
    else if (name == "clique8") s = clique8(name, Vec2::Zero(), 7.0);
    else if (name == "clique8-dynamic") s = clique8(name, Vec2(0.1, 0.0), 7.0);
    else if (name == "clique8-fast") s = clique8(name, Vec2(-8.0, 0.0), 40.0);
    else throw ConfigError("preset: unknown name '" + name + "'");
    s.validate();
    return s;
}

}  // namespace colsafe
