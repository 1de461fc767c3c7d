#include "colsafe/simulation.hpp"

#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "colsafe/errors.hpp"
#include "colsafe/formation.hpp"

namespace colsafe {

namespace {

std::string stamp(double t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "t=%.2f", t);
    return buf;
}

}  // namespace

FormationModel make_model(const Scenario& s) {
    std::vector<double> masses;
    std::vector<Vec2> drive;
    for (const auto& a : s.agents) {
        masses.push_back(a.mass);
        drive.push_back(a.drive);
    }
    std::vector<Spring> springs;
    for (const auto& e : s.edges) springs.push_back({e.i, e.j, e.k, e.R, e.b});
    return {FormationGraph(std::move(masses), std::move(springs)), std::move(drive)};
}

namespace {

std::vector<Obstacle> sensed(const AgentState& x, const std::vector<Obstacle>& obstacles, double radius) {
    std::vector<Obstacle> out;
    for (const auto& o : obstacles)
        if ((x.p - o.p).norm() <= radius) out.push_back(o);
    return out;
}

}  // namespace

StepProblem build_step_problem(const Scenario& scenario, const FormationModel& model,
                               const std::vector<AgentState>& x, const std::vector<Obstacle>& obstacles,
                               const std::vector<Vec2>& du) {
    const auto n = x.size();
    const Polytope U = Polytope::linf_ball(2, scenario.u_max);
    StepProblem sp;
    sp.u_f = model.u_f_all(x);
    sp.net.tree_single_obstacle = scenario.topology == Topology::Tree;
    sp.active.resize(n);
    sp.U_s.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto id = static_cast<AgentId>(i);
        sp.active[i] = sensed(x[i], obstacles, scenario.sensing_radius);
        if (sp.active[i].size() > 1) sp.net.tree_single_obstacle = false;
        sp.U_s[i] = safety_control_set(sp.u_f[i], U);

        const Neighborhood nb = build_neighborhood(id, x, sp.u_f, model.graph);
        const CapabilityStack cs = capability_stack(nb, sp.active[i], scenario.gains);
        AgentProblem ap;
        ap.id = id;
        ap.neighbors = model.graph.neighbors(id);
        ap.U = sp.U_s[i];
        ap.B = cs.B;
        ap.q = cs.q;
        if (!du.empty()) ap.q += cs.D * du.at(i);
        // Neighbor columns are in velocity-change units; over the window tau
        // they act like tau times an acceleration (see velocity_to_accel).
        if (cs.rows() > 0)
            for (AgentId j : ap.neighbors) ap.A_blocks[j] = scenario.tau_interval * cs.block(j);
        sp.net.agents.push_back(std::move(ap));
    }
    return sp;
}

TraceLog run(const Scenario& scenario, const RunOptions& opts) {
    scenario.validate();
    const FormationModel model = make_model(scenario);
    const auto n = scenario.agents.size();
    const auto steps = static_cast<long>(std::llround(scenario.duration / scenario.dt));

    std::vector<AgentState> x;
    for (const auto& a : scenario.agents) x.push_back(a.x);
    std::vector<Obstacle> obstacles = scenario.obstacles;
    std::vector<Vec2> u_prev(n, Vec2::Zero()), u_prev2(n, Vec2::Zero());

    TraceLog log;
    for (long k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) * scenario.dt;
        try {
            std::vector<Vec2> du;
            if (scenario.use_control_rate && k >= 2)
                for (std::size_t i = 0; i < n; ++i) du.push_back((u_prev[i] - u_prev2[i]) / scenario.dt);
            const StepProblem sp = build_step_problem(scenario, model, x, obstacles, du);
            const auto& u_f = sp.u_f;
            const auto& active = sp.active;
            const auto& U_s = sp.U_s;
            const NetworkSnapshot& net = sp.net;

            StepRecord rec;
            rec.t = t;
            for (std::size_t i = 0; i < n; ++i)
                for (const auto& o : active[i]) {
                    const BarrierRecord b{static_cast<AgentId>(i), o.id, h(x[i], o), phi1(x[i], o, scenario.gains)};
                    if (b.h < 0) {
                        char buf[64];
                        std::snprintf(buf, sizeof buf, "%.6g", b.h);
                        log.diagnostics.push_back(stamp(t) + ": agent " + std::to_string(i) + " obstacle " +
                                                  std::to_string(o.id) + " negative h " + buf);
                    }
                    rec.barriers.push_back(b);
                }

            MessageSink sink;
            if (opts.record_messages)
                sink = [&](const MessageRecord& m) { log.messages.push_back({t, m}); };
            const ProtocolOutcome outcome = run_synchronous_engine(net, opts.engine, sink);
            rec.tau = outcome.tau_final;
            rec.upsilon = outcome.upsilon_total;
            rec.status = outcome.status;
            for (const auto& d : outcome.diagnostics)
                if (d.find("pinned") == std::string::npos) log.diagnostics.push_back(stamp(t) + ": " + d);

            std::vector<Vec2> u_s(n);
            for (std::size_t i = 0; i < n; ++i) {
                std::vector<CbfRow> rows;
                for (const auto& o : active[i]) rows.push_back(cbf_row(x[i], u_f[i], o, scenario.gains));
                const FilterResult fr = safety_filter(rows, outcome.U_bar[i], U_s[i], scenario.gains);
                u_s[i] = fr.u_s;
                if (fr.relaxed_set && outcome.status == ProtocolStatus::Converged)
                    log.diagnostics.push_back(stamp(t) + ": agent " + std::to_string(i) +
                                              " filter left the negotiated set");
                for (ObstacleId o : fr.dropped)
                    log.diagnostics.push_back(stamp(t) + ": agent " + std::to_string(i) +
                                              " safety violation: dropped barrier for obstacle " + std::to_string(o));
                rec.agents.push_back({static_cast<AgentId>(i), x[i], u_f[i], u_s[i]});
            }
            log.steps.push_back(std::move(rec));

            x = step(x, u_s, scenario.dt, model);
            advance_obstacles(obstacles, scenario.dt);
            u_prev2 = u_prev;
            u_prev = u_s;
        } catch (const SolverError& e) {
            throw SolverError("step " + std::to_string(k) + " (" + stamp(t) + "): " + e.detail(), e.iterations());
        }
    }
    return log;
}

Summary summarize(const TraceLog& log, const Scenario& scenario) {
    Summary s;
    s.steps = log.steps.size();
    s.tree = scenario.topology == Topology::Tree;
    s.max_us_norm.assign(scenario.agents.size(), 0.0);
    std::vector<std::size_t> degree(scenario.agents.size(), 0);
    for (const auto& e : scenario.edges) {
        ++degree[static_cast<std::size_t>(e.i)];
        ++degree[static_cast<std::size_t>(e.j)];
    }
    for (auto d : degree) s.max_degree = std::max(s.max_degree, d);

    double tau_sum = 0;
    for (const auto& st : log.steps) {
        s.max_tau = std::max(s.max_tau, st.tau);
        tau_sum += st.tau;
        if (st.status == ProtocolStatus::TerminallyInfeasible) ++s.terminally_infeasible_steps;
        if (st.status == ProtocolStatus::RoundCapExceeded) ++s.round_cap_steps;
        for (const auto& b : st.barriers) {
            s.min_h = std::min(s.min_h, b.h);
            if (b.h < 0) ++s.negative_h_records;
        }
        for (const auto& a : st.agents) {
            auto& m = s.max_us_norm.at(static_cast<std::size_t>(a.agent));
            m = std::max(m, a.u_s.norm());
        }
    }
    s.mean_tau = s.steps ? tau_sum / static_cast<double>(s.steps) : 0.0;
    s.theorem2_pass = !s.tree || static_cast<std::size_t>(s.max_tau) <= s.max_degree;
    return s;
}

std::string summary_to_json(const Summary& s) {
    nlohmann::ordered_json j;
    j["steps"] = s.steps;
    if (std::isinf(s.min_h)) j["min_h"] = "inf";
    else j["min_h"] = s.min_h;
    j["negative_h_records"] = s.negative_h_records;
    j["max_tau"] = s.max_tau;
    j["mean_tau"] = s.mean_tau;
    j["terminally_infeasible_steps"] = s.terminally_infeasible_steps;
    j["round_cap_exceeded_steps"] = s.round_cap_steps;
    j["max_us_norm"] = s.max_us_norm;
    if (s.tree) {
        j["max_degree"] = s.max_degree;
        j["theorem2_bound"] = s.theorem2_pass ? "PASS" : "FAIL";
    }
    return j.dump(2) + "\n";
}

}  // namespace colsafe
