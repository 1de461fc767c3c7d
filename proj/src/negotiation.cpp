#include "colsafe/negotiation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "colsafe/capability.hpp"
#include "colsafe/errors.hpp"
#include "colsafe/lp.hpp"

namespace colsafe {

namespace {

constexpr double kEps = 1e-9;

bool has_negative(const Vec& v, double tol = kEps) { return v.size() > 0 && v.minCoeff() < -tol; }
bool has_positive(const Vec& v, double tol = kEps) { return v.size() > 0 && v.maxCoeff() > tol; }

Vec get_or_zero(const std::map<AgentId, Vec>& m, AgentId key, Eigen::Index size) {
    const auto it = m.find(key);
    return it == m.end() ? Vec(Vec::Zero(size)) : it->second;
}

/// Point of U minimizing the largest violation of `target`; used when the
/// requested regions do not even intersect each other.
Vec least_violation_point(const Polytope& U, const Polytope& target) {
    const Eigen::Index n = U.dim();
    const Eigen::Index m = target.rows();
    // variables (u, t): minimize t  s.t.  U.G u <= U.l,  target.G u - t <= target.l
    Mat A = Mat::Zero(U.rows() + m, n + 1);
    Vec b(U.rows() + m);
    A.topLeftCorner(U.rows(), n) = U.G;
    A.bottomLeftCorner(m, n) = target.G;
    A.block(U.rows(), n, m, 1).setConstant(-1.0);
    b << U.l, target.l;
    Vec c = Vec::Zero(n + 1);
    c(n) = 1.0;
    const LpResult lp = solve_lp(c, A, b);
    if (lp.status != LpStatus::Optimal)
        throw SolverError("least-violation LP returned a non-optimal status", lp.iterations);
    return lp.x.head(n);
}

Polytope intersect_all(Eigen::Index dim, const std::vector<const Polytope*>& parts) {
    Polytope out = Polytope::whole_space(dim);
    for (const Polytope* p : parts) out = intersect(out, *p);
    return out;
}

}  // namespace

void Mailbox::post(RequestMsg msg) {
    const AgentId to = msg.to, from = msg.from;
    requests_[to][from] = std::move(msg);
}

void Mailbox::post(AdjustmentMsg msg) {
    const AgentId to = msg.to, from = msg.from;
    adjustments_[to][from] = std::move(msg);
}

std::vector<RequestMsg> Mailbox::take_requests(AgentId to) {
    std::vector<RequestMsg> out;
    auto it = requests_.find(to);
    if (it == requests_.end()) return out;
    for (auto& [from, msg] : it->second) out.push_back(std::move(msg));
    requests_.erase(it);
    return out;
}

std::vector<AdjustmentMsg> Mailbox::take_adjustments(AgentId to) {
    std::vector<AdjustmentMsg> out;
    auto it = adjustments_.find(to);
    if (it == adjustments_.end()) return out;
    for (auto& [from, msg] : it->second) out.push_back(std::move(msg));
    adjustments_.erase(it);
    return out;
}

std::map<AgentId, Vec> split_deficit(const Vec& delta, const std::vector<AgentId>& neighbors,
                                     const std::set<AgentId>& constrained) {
    std::vector<AgentId> open;
    for (AgentId j : neighbors)
        if (!constrained.count(j)) open.push_back(j);
    std::map<AgentId, Vec> out;
    for (AgentId j : neighbors) out[j] = Vec::Zero(delta.size());
    if (open.empty()) return out;
    const Vec share = delta / static_cast<double>(open.size());
    for (AgentId j : open) out[j] = share;
    return out;
}

NegotiationLedger init_ledger(const AgentProblem& agent) {
    NegotiationLedger L;
    L.U_bar = agent.U;
    const Eigen::Index K = agent.rows();
    for (AgentId j : agent.neighbors) {
        L.c_bar_out[j] = Vec::Zero(K);
    }
    return L;
}

Vec residual_deficit(const AgentProblem& agent, const NegotiationLedger& ledger) {
    if (ledger.c_bar.size() != agent.rows()) throw ContractError("residual_deficit: capability not computed");
    Vec r = ledger.c_bar;
    for (const auto& [j, c] : ledger.c_bar_out) r -= c;
    return r;
}

std::vector<RequestMsg> make_requests(const AgentProblem& agent, NegotiationLedger& ledger) {
    ledger.delta_out.clear();
    ledger.eps_in.clear();
    std::vector<RequestMsg> out;
    if (agent.rows() == 0) {
        ledger.delta = Vec(0);
        return out;
    }
    ledger.delta = residual_deficit(agent, ledger);
    if (!has_negative(ledger.delta)) return out;
    if (ledger.constrained_set.size() == agent.neighbors.size()) return out;

    const auto shares = split_deficit(ledger.delta, agent.neighbors, ledger.constrained_set);
    for (AgentId j : agent.neighbors) {
        const Vec& share = shares.at(j);
        ledger.delta_out[j] = share;
        if (!has_negative(share, 0.0)) continue;
        const auto a = agent.A_blocks.find(j);
        RequestMsg msg;
        msg.from = agent.id;
        msg.to = j;
        msg.delta = share;
        msg.A_block = a == agent.A_blocks.end() ? Mat(Mat::Zero(agent.rows(), agent.U.dim())) : a->second;
        out.push_back(std::move(msg));
    }
    if (!out.empty()) ledger.requested = true;
    return out;
}

Polytope request_region(const Mat& A_block, const Vec& c_bar, const Vec& delta) {
    if (A_block.rows() != c_bar.size() || c_bar.size() != delta.size())
        throw ContractError("request_region: row counts differ");
    return Polytope(-A_block, c_bar + delta);
}

ClosestPointChoice get_closest_point(const Polytope& U, const std::optional<Vec>& u_prev,
                                     const std::vector<ClosestPointInput>& inputs) {
    const Eigen::Index n = U.dim();
    std::vector<const Polytope*> all, current;
    bool any_prev = false;
    for (const auto& in : inputs) {
        all.push_back(&in.region);
        if (has_negative(in.delta, 0.0)) current.push_back(&in.region);
        if (has_negative(in.delta_prev, 0.0)) any_prev = true;
    }

    ClosestPointChoice out;
    const Polytope target_all = intersect_all(n, all);
    if (!any_prev) {
        out.branch = 1;
        if (is_empty(target_all)) {
            out.branch = 0;
            out.u_bar = least_violation_point(U, target_all);
        } else {
            out.u_bar = closest_points(U, target_all).z1;
        }
        return out;
    }

    const Polytope target = intersect_all(n, current);
    if (is_empty(target)) {
        out.branch = 0;
        out.u_bar = least_violation_point(U, target);
        return out;
    }
    if (is_empty(intersect(U, target))) {
        out.branch = 2;
        out.u_bar = closest_points(U, target).z1;
        return out;
    }
    out.branch = 3;
    const Vec anchor = u_prev ? *u_prev : Vec(Vec::Zero(n));
    try {
        out.u_bar = project_onto_boundary_region(U, target, anchor);
    } catch (const ContractError&) {
        out.branch = 2;  // boundary misses the requested region
        out.u_bar = closest_points(U, target).z1;
    }
    return out;
}

CoordinateResult coordinate(const AgentProblem& agent, NegotiationLedger& ledger,
                            const std::vector<Request>& requests) {
    CoordinateResult out;
    ledger.eps_out.clear();
    std::map<AgentId, const Request*> by_from;
    for (const auto& r : requests) by_from[r.from] = &r;

    ledger.delta_in_prev = ledger.delta_in;
    ledger.delta_in.clear();

    struct Row {
        AgentId j;
        Polytope region;
        Vec delta;
        Vec delta_prev;
    };
    std::vector<Row> rows;
    for (AgentId j : agent.neighbors) {
        const auto req = by_from.find(j);
        if (req != by_from.end()) ledger.A_in[j] = req->second->A_block;
        const auto a = ledger.A_in.find(j);
        if (a == ledger.A_in.end()) continue;  // j never depended on me
        const Eigen::Index Kj = a->second.rows();
        const Vec delta = req != by_from.end() ? req->second->delta : Vec(Vec::Zero(Kj));
        if (!ledger.c_bar_in.count(j)) ledger.c_bar_in[j] = Vec::Zero(Kj);
        ledger.delta_in[j] = delta;
        rows.push_back({j, request_region(a->second, ledger.c_bar_in[j], delta), delta,
                        get_or_zero(ledger.delta_in_prev, j, Kj)});
    }

    // Earlier agreements are carried by c_bar_in, so each pass starts from U.
    Polytope joint = agent.U;
    for (const auto& r : rows) joint = intersect(joint, r.region);
    Vec u_eval;
    if (!is_empty(joint)) {
        ledger.U_bar = joint;
    } else {
        std::vector<ClosestPointInput> inputs;
        for (const auto& r : rows) inputs.push_back({r.j, r.region, r.delta, r.delta_prev});
        const ClosestPointChoice cp = get_closest_point(agent.U, ledger.u_bar_prev, inputs);
        u_eval = cp.u_bar;
        ledger.u_bar_prev = u_eval;
        ledger.U_bar = Polytope::box(u_eval, u_eval);
        out.pinned = true;
    }

    for (const auto& r : rows) {
        const Mat& A = ledger.A_in.at(r.j);
        Vec eps = Vec::Zero(A.rows());
        if (out.pinned) {
            const Vec slack = A * u_eval + ledger.c_bar_in[r.j] + r.delta;
            eps = (-slack).cwiseMax(0.0);
            for (Eigen::Index k = 0; k < eps.size(); ++k)
                if (eps(k) <= kEps) eps(k) = 0.0;
        }
        ledger.c_bar_in[r.j] += r.delta + eps;
        ledger.eps_out[r.j] = eps;
        const bool requested = by_from.count(r.j) > 0;
        if (requested || has_positive(eps)) out.adjustments.push_back({agent.id, r.j, eps});
    }
    return out;
}

bool absorb_adjustments(const AgentProblem& agent, NegotiationLedger& ledger,
                        const std::vector<AdjustmentMsg>& adjustments) {
    const Eigen::Index K = agent.rows();
    for (const auto& a : adjustments) {
        if (a.epsilon.size() != K) throw ContractError("absorb_adjustments: adjustment size mismatch");
        ledger.eps_in[a.from] = a.epsilon;
    }
    bool any_eps = false;
    for (AgentId j : agent.neighbors) {
        const Vec d = get_or_zero(ledger.delta_out, j, K);
        const Vec e = get_or_zero(ledger.eps_in, j, K);
        if (K > 0) ledger.c_bar_out[j] += d + e;
        if (has_positive(e)) {
            ledger.constrained_set.insert(j);
            any_eps = true;
        }
    }
    for (const auto& [j, e] : ledger.eps_out)
        if (has_positive(e)) any_eps = true;
    const bool all_constrained = ledger.constrained_set.size() == agent.neighbors.size();
    return all_constrained || !any_eps;
}

std::string to_string(ProtocolStatus s) {
    switch (s) {
        case ProtocolStatus::Converged: return "converged";
        case ProtocolStatus::TerminallyInfeasible: return "terminally_infeasible";
        case ProtocolStatus::RoundCapExceeded: return "round_cap_exceeded";
    }
    return "unknown";
}

ProtocolOutcome run_synchronous_engine(const NetworkSnapshot& net, const EngineOptions& opts,
                                       const MessageSink& sink) {
    const auto n = net.agents.size();
    ProtocolOutcome out;
    std::map<AgentId, size_t> index;
    size_t max_degree = 0;
    for (size_t i = 0; i < n; ++i) {
        const AgentProblem& a = net.agents[i];
        if (i > 0 && a.id <= net.agents[i - 1].id)
            throw ContractError("run_synchronous_engine: agents must be in ascending id order");
        if (a.B.rows() != a.q.size()) throw ContractError("run_synchronous_engine: B and q sizes differ");
        if (is_empty(a.U)) throw ContractError("run_synchronous_engine: empty control set");
        index[a.id] = i;
        max_degree = std::max(max_degree, a.neighbors.size());
    }
    for (const auto& a : net.agents)
        for (AgentId j : a.neighbors)
            if (!index.count(j)) throw ContractError("run_synchronous_engine: unknown neighbor id");

    const int neg_cap = opts.negotiation_cap > 0 ? opts.negotiation_cap : std::max<int>(2 * static_cast<int>(n), 2);
    const int collab_cap =
        opts.collaboration_cap > 0 ? opts.collaboration_cap : std::max(2 * static_cast<int>(max_degree), 16);

    std::vector<NegotiationLedger> L;
    for (const auto& a : net.agents) L.push_back(init_ledger(a));
    Mailbox box;

    auto emit = [&](int tau, int ups, AgentId from, AgentId to, MessageKind kind, const Vec& payload) {
        if (sink) sink({tau, ups, from, to, kind, payload});
    };

    // Responders of the first round; the tree bound is taken over their degrees.
    size_t responder_degree = 0;
    bool converged = false;
    bool cap_hit = false;
    int tau = 0;
    for (tau = 1; tau <= collab_cap; ++tau) {
        for (size_t i = 0; i < n; ++i) {
            const AgentProblem& a = net.agents[i];
            L[i].tau = tau;
            L[i].upsilon = 0;
            L[i].constrained_set.clear();
            if (a.rows() > 0) {
                const CapabilityResult cap = max_min_capability(a.B, L[i].U_bar);
                L[i].u_star = cap.u_star;
                L[i].c_bar = a.B * cap.u_star + a.q;
            } else {
                L[i].u_star = Vec::Zero(a.U.dim());
                L[i].c_bar = Vec(0);
            }
        }

        bool negotiated = false;
        for (int ups = 1; ups <= neg_cap; ++ups) {
            ++out.upsilon_total;
            for (size_t i = 0; i < n; ++i) {
                L[i].upsilon = ups;
                for (auto& msg : make_requests(net.agents[i], L[i])) {
                    emit(tau, ups, msg.from, msg.to, MessageKind::Request, msg.delta);
                    box.post(std::move(msg));
                }
            }
            for (size_t i = 0; i < n; ++i) {
                std::vector<Request> reqs;
                for (auto& m : box.take_requests(net.agents[i].id)) {
                    if (tau == 1 && has_negative(m.delta, 0.0))
                        responder_degree = std::max(responder_degree, net.agents[i].neighbors.size());
                    reqs.push_back({m.from, std::move(m.delta), std::move(m.A_block)});
                }
                CoordinateResult cr = coordinate(net.agents[i], L[i], reqs);
                if (cr.pinned)
                    out.diagnostics.push_back("tau " + std::to_string(tau) + ": agent " +
                                              std::to_string(net.agents[i].id) + " pinned to a compromise action");
                for (auto& adj : cr.adjustments) {
                    if (has_positive(adj.epsilon))
                        emit(tau, ups, adj.from, adj.to, MessageKind::Adjustment, adj.epsilon);
                    box.post(std::move(adj));
                }
            }
            bool all_done = true;
            for (size_t i = 0; i < n; ++i) {
                const bool done = absorb_adjustments(net.agents[i], L[i], box.take_adjustments(net.agents[i].id));
                all_done = all_done && done;
            }
            if (all_done) {
                negotiated = true;
                break;
            }
        }
        if (!negotiated) {
            cap_hit = true;
            out.diagnostics.push_back("tau " + std::to_string(tau) + ": negotiation round cap reached");
            break;
        }

        bool ok = true;
        for (size_t i = 0; i < n && ok; ++i) {
            const AgentProblem& a = net.agents[i];
            if (a.rows() == 0) continue;
            const Vec r = residual_deficit(a, L[i]);
            if (r.minCoeff() < -opts.tol * std::max(1.0, L[i].c_bar.cwiseAbs().maxCoeff())) ok = false;
        }
        if (ok) {
            // Every agent must still meet its own share once it counts on the allocations.
            for (size_t i = 0; i < n && ok; ++i) {
                const AgentProblem& a = net.agents[i];
                if (a.rows() == 0) continue;
                if (is_empty(intersect(L[i].U_bar, own_constraint_region(a, L[i])))) ok = false;
            }
        }
        if (ok) {
            converged = true;
            break;
        }
        if (net.tree_single_obstacle) {
            const size_t bound = responder_degree > 0 ? responder_degree : max_degree;
            if (static_cast<size_t>(tau + 1) > bound) {
                out.status = ProtocolStatus::TerminallyInfeasible;
                out.tau_final = tau + 1;
                break;
            }
        }
    }

    if (converged) {
        out.status = ProtocolStatus::Converged;
        out.tau_final = tau;
    } else if (out.status != ProtocolStatus::TerminallyInfeasible) {
        out.status = ProtocolStatus::RoundCapExceeded;
        out.tau_final = cap_hit ? tau : collab_cap;
        if (!cap_hit) out.diagnostics.push_back("collaboration round cap reached");
    }

    for (size_t i = 0; i < n; ++i) {
        const AgentProblem& a = net.agents[i];
        Polytope U = L[i].U_bar;
        if (converged && a.rows() > 0) {
            const Polytope own = intersect(U, own_constraint_region(a, L[i]));
            if (!is_empty(own)) U = own;
        }
        if (is_empty(U)) U = a.U;
        out.U_bar.push_back(std::move(U));
    }
    out.ledgers = std::move(L);
    return out;
}

Polytope own_constraint_region(const AgentProblem& agent, const NegotiationLedger& ledger) {
    Vec pledged = Vec::Zero(agent.rows());
    for (const auto& [j, c] : ledger.c_bar_out) pledged += c;
    return Polytope(-agent.B, agent.q - pledged);
}

}  // namespace colsafe
