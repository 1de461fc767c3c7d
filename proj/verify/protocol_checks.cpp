#include <cmath>
#include <cstdio>
#include <map>
#include <tuple>

#include "colsafe/verify.hpp"

namespace colsafe::verify {

namespace {

AgentProblem responder(AgentId id, std::vector<AgentId> neighbors, const Polytope& U) {
    AgentProblem a;
    a.id = id;
    a.neighbors = std::move(neighbors);
    a.U = U;
    a.B = Mat::Zero(0, 2);
    a.q = Vec(0);
    return a;
}

AgentProblem leaf(AgentId id, AgentId parent, const RowVec2& A_on_parent) {
    AgentProblem a;
    a.id = id;
    a.neighbors = {parent};
    a.U = Polytope::linf_ball(2, 1.0);
    a.B = Mat(1, 2);
    a.B << 0.1, 0.0;
    a.q = Vec::Constant(1, -1.6);
    a.A_blocks[parent] = Mat(A_on_parent);
    return a;
}

Mat row(double x, double y) {
    Mat A(1, 2);
    A << x, y;
    return A;
}

/// Expected adjustment for a pinned responder, written out independently.
Vec expected_eps(const Mat& A, const Vec& u, const Vec& c, const Vec& delta) {
    Vec e(A.rows());
    for (Eigen::Index k = 0; k < A.rows(); ++k) e(k) = std::max(0.0, -(A.row(k).dot(u) + c(k) + delta(k)));
    return e;
}

}  // namespace

NetworkSnapshot infeasible_tree_fixture() {
    NetworkSnapshot net;
    net.agents.push_back(responder(0, {1, 2}, Polytope::linf_ball(2, 1.0)));
    net.agents.push_back(leaf(1, 0, RowVec2(1.0, 1.0)));
    net.agents.push_back(leaf(2, 0, RowVec2(-1.0, 1.0)));
    net.tree_single_obstacle = true;
    return net;
}

CheckResult protocol_algebra() {
    CheckResult r{6, "negotiation algebra", true, ""};
    std::string fail;
    auto require = [&](bool ok, const char* what) {
        if (!ok && fail.empty()) fail = what;
    };

    // Opposing requests on a box: the responder has to pin and hand back the shortfall.
    {
        const AgentProblem a = responder(0, {1, 2}, Polytope::linf_ball(2, 1.0));
        NegotiationLedger L = init_ledger(a);
        const std::vector<Request> reqs{{1, Vec::Constant(1, -0.8), row(1, 0)}, {2, Vec::Constant(1, -0.8), row(-1, 0)}};
        const CoordinateResult cr = coordinate(a, L, reqs);
        require(cr.pinned && L.u_bar_prev.has_value(), "opposing requests did not pin the responder");
        if (cr.pinned && L.u_bar_prev) {
            const Vec u = *L.u_bar_prev;
            require(contains(a.U, u), "compromise action outside U");
            for (const auto& adj : cr.adjustments) {
                const Mat& A = adj.to == 1 ? reqs[0].A_block : reqs[1].A_block;
                const Vec& d = adj.to == 1 ? reqs[0].delta : reqs[1].delta;
                const Vec e = expected_eps(A, u, Vec::Zero(1), d);
                require((adj.epsilon - e).cwiseAbs().maxCoeff() <= 1e-12, "epsilon differs from the shortfall");
                // the new allocation is exactly met by the pinned action
                require((A * u + L.c_bar_in.at(adj.to)).minCoeff() >= -1e-12, "allocation not met after update");
            }
            require(cr.adjustments.size() == 2, "expected one adjustment per requester");
        }
    }

    // Singleton U = {(5, 0)}, standing allocation -10, zero request: epsilon = 5.
    {
        const Vec p = Vec2(5.0, 0.0);
        const AgentProblem a = responder(0, {1}, Polytope::box(p, p));
        NegotiationLedger L = init_ledger(a);
        L.c_bar_in[1] = Vec::Constant(1, -10.0);
        const CoordinateResult cr = coordinate(a, L, {{1, Vec::Zero(1), row(1, 0)}});
        require(cr.adjustments.size() == 1 && std::abs(cr.adjustments[0].epsilon(0) - 5.0) <= 1e-9,
                "singleton example epsilon is not 5");
    }

    // Equal splits, constrained neighbors excluded.
    {
        const Vec d = Vec::Constant(1, -6.0);
        const auto s3 = split_deficit(d, {1, 2, 3}, {});
        require(std::abs(s3.at(1)(0) + 2) < 1e-15 && std::abs(s3.at(2)(0) + 2) < 1e-15 &&
                    std::abs(s3.at(3)(0) + 2) < 1e-15,
                "three-way split is not -2 each");
        const auto s2 = split_deficit(d, {1, 2, 3}, {3});
        require(std::abs(s2.at(1)(0) + 3) < 1e-15 && std::abs(s2.at(2)(0) + 3) < 1e-15 && s2.at(3)(0) == 0.0,
                "split with a constrained neighbor is not -3, -3, 0");
    }

    // A root that cannot move toward the requests stays fully constrained: each
    // of its adjustments cancels the request it answers.
    {
        NetworkSnapshot net;
        net.agents.push_back(responder(0, {1, 2}, Polytope::box(Vec2(-1, -1), Vec2(0, 1))));
        net.agents.push_back(leaf(1, 0, RowVec2(1.0, 0.0)));
        net.agents.push_back(leaf(2, 0, RowVec2(1.0, 0.0)));
        std::map<std::tuple<int, int, AgentId>, double> asked;
        int answered = 0;
        double drift = 0;
        const ProtocolOutcome out = run_synchronous_engine(net, {}, [&](const MessageRecord& m) {
            if (m.kind == MessageKind::Request && m.to == 0) asked[{m.tau, m.upsilon, m.from}] = m.payload(0);
            if (m.kind == MessageKind::Adjustment && m.from == 0) {
                const auto it = asked.find({m.tau, m.upsilon, m.to});
                if (it == asked.end()) return;
                ++answered;
                drift = std::max(drift, std::abs(it->second + m.payload(0)));
            }
        });
        require(answered > 0 && drift <= 1e-9, "delta + epsilon did not vanish for the constrained root");
        for (std::size_t i = 1; i < out.ledgers.size(); ++i)
            require(std::abs(out.ledgers[i].c_bar_out.at(0)(0)) <= 1e-9, "leaf kept a nonzero allocation");
        require(out.status != ProtocolStatus::Converged, "unsatisfiable star reported convergence");
    }

    r.passed = fail.empty();
    r.detail = r.passed ? "exact epsilon, allocation update, splits, constrained persistence" : fail;
    return r;
}

CheckResult terminal_infeasibility() {
    CheckResult r{7, "terminal infeasibility", true, ""};
    const NetworkSnapshot net = infeasible_tree_fixture();
    const ProtocolOutcome out = run_synchronous_engine(net);
    // Certificate: the grid maximum plus the worst interpolation error is still negative.
    const double step = 0.25;
    const double grid = grid_joint_margin(net, step);
    double lip = 0;
    for (const auto& a : net.agents) {
        if (a.rows() == 0) continue;
        for (Eigen::Index k = 0; k < a.rows(); ++k) {
            double l1 = a.B.row(k).cwiseAbs().sum();
            for (const auto& [j, A] : a.A_blocks) l1 += A.row(k).cwiseAbs().sum();
            lip = std::max(lip, l1);
        }
    }
    const double bound = grid + lip * step / 2;
    r.passed = out.status == ProtocolStatus::TerminallyInfeasible && out.tau_final <= 3 && bound < 0;
    char buf[200];
    std::snprintf(buf, sizeof buf, "status %s at tau %d, certified joint margin <= %.3f (grid %.3f)",
                  to_string(out.status).c_str(), out.tau_final, bound, grid);
    r.detail = buf;
    return r;
}

}  // namespace colsafe::verify
