#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "colsafe/polytope.hpp"

namespace colsafe {

/// One agent's view of the current time step, in acceleration units.
struct AgentProblem {
    AgentId id = 0;
    std::vector<AgentId> neighbors;  // ascending
    Polytope U;                      // admissible safety modifications
    Mat B;                           // K x 2
    Vec q;                           // K, control-rate term already folded in
    std::map<AgentId, Mat> A_blocks; // neighbor -> K x 2 effect of its control on my rows

    Eigen::Index rows() const { return q.size(); }
};

struct NetworkSnapshot {
    std::vector<AgentProblem> agents;  // ascending id
    /// Tree topology with at most one active obstacle per agent: enables the
    /// round-bound terminal infeasibility test.
    bool tree_single_obstacle = false;
};

struct RequestMsg {
    AgentId from = 0;
    AgentId to = 0;
    Vec delta;    // K_from; negative entries ask for help
    Mat A_block;  // K_from x 2, sender's coefficients on the receiver's control
};

struct AdjustmentMsg {
    AgentId from = 0;
    AgentId to = 0;
    Vec epsilon;  // K_to; positive on rows the sender cannot satisfy
};

enum class MessageKind { Request, Adjustment };

struct MessageRecord {
    int tau = 0;
    int upsilon = 0;
    AgentId from = 0;
    AgentId to = 0;
    MessageKind kind = MessageKind::Request;
    Vec payload;
};

using MessageSink = std::function<void(const MessageRecord&)>;

/// In-process transport. Delivery order is ascending sender id.
class Mailbox {
public:
    void post(RequestMsg msg);
    void post(AdjustmentMsg msg);
    std::vector<RequestMsg> take_requests(AgentId to);
    std::vector<AdjustmentMsg> take_adjustments(AgentId to);
    bool empty() const { return requests_.empty() && adjustments_.empty(); }

private:
    std::map<AgentId, std::map<AgentId, RequestMsg>> requests_;
    std::map<AgentId, std::map<AgentId, AdjustmentMsg>> adjustments_;
};

struct NegotiationLedger {
    int tau = 0;
    int upsilon = 0;
    std::map<AgentId, Vec> c_bar_out;      // allocation I count on from j (my rows)
    std::map<AgentId, Vec> c_bar_in;       // allocation j counts on from me (j's rows)
    std::map<AgentId, Vec> delta_in;       // this round's request from j
    std::map<AgentId, Vec> delta_in_prev;  // previous round's request from j
    std::map<AgentId, Mat> A_in;           // j's coefficients on my control
    std::set<AgentId> constrained_set;     // neighbors that returned a positive adjustment
    Polytope U_bar;
    std::optional<Vec> u_bar_prev;  // last compromise action

    // scratch for the current collaborative / negotiation round
    Vec u_star;
    Vec c_bar;  // B u* + q
    Vec delta;  // deficit at the start of the latest negotiation round
    std::map<AgentId, Vec> delta_out;
    std::map<AgentId, Vec> eps_out;
    std::map<AgentId, Vec> eps_in;
    bool requested = false;  // sent at least one request this time step
};

/// Equal-weight split of the residual vector over neighbors that are not fully
/// constrained. Surplus rows are split too, so each neighbor gets a margin it
/// may spend on them. Constrained neighbors receive zero.
std::map<AgentId, Vec> split_deficit(const Vec& delta, const std::vector<AgentId>& neighbors,
                                     const std::set<AgentId>& constrained);

NegotiationLedger init_ledger(const AgentProblem& agent);

/// First half of a negotiation round: deficit and outgoing requests.
std::vector<RequestMsg> make_requests(const AgentProblem& agent, NegotiationLedger& ledger);

/// Requests received by a responder, one per neighbor that sent one.
struct Request {
    AgentId from = 0;
    Vec delta;
    Mat A_block;
};

struct CoordinateResult {
    bool pinned = false;  // requests were jointly infeasible; U_bar is a single action
    std::vector<AdjustmentMsg> adjustments;
};

/// Builds the neighbor request regions, intersects them with U, and falls back
/// to a compromise action when the intersection is empty. Updates stored
/// allocations c_bar_in and the cached previous-round requests.
CoordinateResult coordinate(const AgentProblem& agent, NegotiationLedger& ledger,
                            const std::vector<Request>& requests);

/// Request region {u : A u + c + delta >= 0} in the form G u - l <= 0.
Polytope request_region(const Mat& A_block, const Vec& c_bar, const Vec& delta);

struct ClosestPointInput {
    AgentId from = 0;
    Polytope region;
    Vec delta;
    Vec delta_prev;
};

/// Compromise action on the boundary of U (three-branch selection). Also
/// reports which branch produced it (1, 2, 3) or 0 for the fallback used when
/// the requested regions themselves do not intersect.
struct ClosestPointChoice {
    Vec u_bar;
    int branch = 0;
};
ClosestPointChoice get_closest_point(const Polytope& U, const std::optional<Vec>& u_prev,
                                     const std::vector<ClosestPointInput>& inputs);

/// Second half of a negotiation round: applies adjustments and returns the
/// agent's termination test.
bool absorb_adjustments(const AgentProblem& agent, NegotiationLedger& ledger,
                        const std::vector<AdjustmentMsg>& adjustments);

/// {u : B u + q - sum_j c_bar_out[j] >= 0}: what a requester must still
/// deliver itself once it counts on its neighbors' allocations.
Polytope own_constraint_region(const AgentProblem& agent, const NegotiationLedger& ledger);

/// Deficit after all allocations: c_bar - sum_j c_bar_out[j].
Vec residual_deficit(const AgentProblem& agent, const NegotiationLedger& ledger);

enum class ProtocolStatus { Converged, TerminallyInfeasible, RoundCapExceeded };
std::string to_string(ProtocolStatus s);

struct ProtocolOutcome {
    ProtocolStatus status = ProtocolStatus::Converged;
    std::vector<Polytope> U_bar;  // per agent, snapshot order; always nonempty
    int tau_final = 0;
    int upsilon_total = 0;
    std::vector<NegotiationLedger> ledgers;
    std::vector<std::string> diagnostics;
};

struct EngineOptions {
    int negotiation_cap = 0;    // 0 = 2 n
    int collaboration_cap = 0;  // 0 = max(2 max_degree, 16)
    double tol = 1e-9;
};

/// Lockstep execution of the collaborative safety protocol for one time step.
/// Every agent finishes a half-round before any agent starts the next one.
ProtocolOutcome run_synchronous_engine(const NetworkSnapshot& net, const EngineOptions& opts = {},
                                       const MessageSink& sink = {});

/// Same as run_synchronous_engine; kept as the protocol-level entry point.
inline ProtocolOutcome collaborative_safety_round(const NetworkSnapshot& net,
                                                  const EngineOptions& opts = {},
                                                  const MessageSink& sink = {}) {
    return run_synchronous_engine(net, opts, sink);
}

}  // namespace colsafe
