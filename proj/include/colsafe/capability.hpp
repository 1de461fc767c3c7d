#pragma once

#include "colsafe/barrier.hpp"
#include "colsafe/polytope.hpp"

namespace colsafe {

struct CapabilityResult {
    Vec u_star;             // best own action
    double gamma_star = 0;  // worst row of B u_star
    Vec c_bar;              // B u_star + q (empty from max_min_capability)
};

/// max over u in U of min_k [B u]_k, solved as the LP
///   minimize -gamma  s.t.  G u - l <= 0,  gamma 1 - B u <= 0.
/// Throws ContractError if B has no rows, U is empty, or the LP is unbounded.
CapabilityResult max_min_capability(const Mat& B, const Polytope& U);

/// Runs the max-min LP on B and reports c_bar = B u* + q_eff, where
/// q_eff = q + D d(u) folds the control-rate term into the drift.
CapabilityResult capability_request_vector(const CapabilityStack& stack, const Polytope& U,
                                           const Vec2& d_ui);

}  // namespace colsafe
