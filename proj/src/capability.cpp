#include "colsafe/capability.hpp"

#include "colsafe/errors.hpp"
#include "colsafe/lp.hpp"

#include <algorithm>

namespace colsafe {

namespace {

LpResult solve_max_min(const Mat& B, const Polytope& U) {
    const Eigen::Index K = B.rows();
    const Eigen::Index n = U.dim();

    // xi = (gamma, u)
    Mat A = Mat::Zero(U.rows() + K, n + 1);
    Vec b = Vec::Zero(U.rows() + K);
    A.block(0, 1, U.rows(), n) = U.G;
    b.head(U.rows()) = U.l;
    A.block(U.rows(), 0, K, 1).setOnes();
    A.block(U.rows(), 1, K, n) = -B;
    Vec c = Vec::Zero(n + 1);
    c(0) = -1.0;

    return solve_lp(c, A, b);
}

}  // namespace

CapabilityResult max_min_capability(const Mat& B, const Polytope& U) {
    if (B.rows() == 0) throw ContractError("max_min_capability: B has no rows");
    if (B.cols() != U.dim()) throw ContractError("max_min_capability: B and U dimensions differ");
    const Eigen::Index n = U.dim();

    LpResult lp = solve_max_min(B, U);
    if (lp.status == LpStatus::Infeasible) {
        // Sets accepted as nonempty within the membership tolerance are widened
        // by their residual violation so both tests agree.
        if (const auto p = feasible_point(U)) {
            const double slack = std::max(0.0, U.max_violation(*p)) + 1e-12;
            lp = solve_max_min(B, Polytope(U.G, U.l.array() + slack));
        }
    }
    switch (lp.status) {
        case LpStatus::Infeasible:
            throw ContractError("max_min_capability: control set is empty");
        case LpStatus::Unbounded:
            throw ContractError("max_min_capability: LP is unbounded (control set unbounded)");
        case LpStatus::Optimal:
            break;
    }
    CapabilityResult out;
    out.u_star = lp.x.tail(n);
    out.gamma_star = (B * out.u_star).minCoeff();
    return out;
}

CapabilityResult capability_request_vector(const CapabilityStack& stack, const Polytope& U,
                                           const Vec2& d_ui) {
    CapabilityResult out = max_min_capability(stack.B, U);
    out.c_bar = stack.B * out.u_star + stack.q + stack.D * d_ui;
    return out;
}

}  // namespace colsafe
