#pragma once

#include "colsafe/types.hpp"

namespace colsafe {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    Vec x;                 // primal point (valid when Optimal)
    double objective = 0;  // c^T x
    int iterations = 0;    // total simplex pivots across both phases
};

struct LpOptions {
    double pivot_tol = 1e-10;
    double feas_tol = 1e-9;  // phase-1 residual above this (scaled by |b|) means infeasible
    int max_iterations = 0;  // 0 = automatic, proportional to problem size
};

/// Dense two-phase simplex for
///
///     minimize c^T x  subject to  A x <= b,  x free.
///
/// Free variables are split as x = x+ - x-. Entering/leaving choices follow
/// Bland's rule, so the returned vertex is a deterministic function of the
/// input. Throws SolverError if the iteration cap is reached.
LpResult solve_lp(const Vec& c, const Mat& A, const Vec& b, const LpOptions& opts = {});

}  // namespace colsafe
