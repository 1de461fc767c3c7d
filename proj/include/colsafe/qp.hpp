#pragma once

#include <optional>

#include "colsafe/types.hpp"

namespace colsafe {

/// minimize 1/2 x^T H x + c^T x  s.t.  A x <= b,  Aeq x = beq.
/// H must be symmetric positive definite.
struct QpProblem {
    Mat H;
    Vec c;
    Mat A;
    Vec b;
    Mat Aeq;
    Vec beq;
};

struct QpResult {
    Vec x;
    double objective = 0;
    int iterations = 0;
};

struct QpOptions {
    double tol = 1e-10;
    int max_iterations = 500;
};

/// Primal active-set method. A feasible start is obtained from the simplex
/// phase-1 problem unless `x0` is supplied (and feasible).
/// Throws ContractError if the constraints are infeasible and SolverError if
/// the active-set loop does not terminate.
QpResult solve_qp(const QpProblem& qp, const std::optional<Vec>& x0 = std::nullopt,
                  const QpOptions& opts = {});

}  // namespace colsafe
