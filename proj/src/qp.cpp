#include "colsafe/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "colsafe/errors.hpp"
#include "colsafe/lp.hpp"

namespace colsafe {
namespace {

Mat or_empty(const Mat& m, Eigen::Index n) { return m.size() == 0 ? Mat(0, n) : m; }
Vec or_empty(const Vec& v) { return v.size() == 0 ? Vec(0) : v; }

Vec feasible_start(const Mat& A, const Vec& b, const Mat& Aeq, const Vec& beq) {
    const Eigen::Index n = A.cols();
    Mat stacked(A.rows() + 2 * Aeq.rows(), n);
    Vec rhs(stacked.rows());
    stacked << A, Aeq, -Aeq;
    rhs << b, beq, -beq;
    const LpResult lp = solve_lp(Vec::Zero(n), stacked, rhs);
    if (lp.status != LpStatus::Optimal) throw ContractError("solve_qp: constraints are infeasible");
    return lp.x;
}

}  // namespace

QpResult solve_qp(const QpProblem& qp, const std::optional<Vec>& x0, const QpOptions& opts) {
    const Eigen::Index n = qp.H.rows();
    if (qp.H.cols() != n || qp.c.size() != n) throw ContractError("solve_qp: objective dimension mismatch");
    const Mat A = or_empty(qp.A, n);
    const Vec b = or_empty(qp.b);
    const Mat Aeq = or_empty(qp.Aeq, n);
    const Vec beq = or_empty(qp.beq);
    if (A.cols() != n || A.rows() != b.size() || Aeq.cols() != n || Aeq.rows() != beq.size())
        throw ContractError("solve_qp: constraint dimension mismatch");

    const int m = static_cast<int>(A.rows());
    const int me = static_cast<int>(Aeq.rows());

    Vec x;
    // A start accepted by the polytope membership test is good enough here.
    const double start_tol = 1e-8 * (1.0 + (m ? b.cwiseAbs().maxCoeff() : 0.0));
    if (x0 && x0->size() == n && (m == 0 || (A * *x0 - b).maxCoeff() <= start_tol) &&
        (me == 0 || (Aeq * *x0 - beq).cwiseAbs().maxCoeff() <= start_tol)) {
        x = *x0;
    } else {
        x = feasible_start(A, b, Aeq, beq);
    }

    std::vector<int> working;  // indices into the inequality rows
    QpResult out;
    for (int it = 0;; ++it) {
        if (it >= opts.max_iterations) throw SolverError("active-set QP did not terminate", it);
        out.iterations = it;

        const int w = static_cast<int>(working.size());
        const int k = me + w;
        Mat kkt = Mat::Zero(n + k, n + k);
        Vec rhs = Vec::Zero(n + k);
        kkt.topLeftCorner(n, n) = qp.H;
        rhs.head(n) = -(qp.H * x + qp.c);
        for (int r = 0; r < me; ++r) {
            kkt.block(n + r, 0, 1, n) = Aeq.row(r);
            kkt.block(0, n + r, n, 1) = Aeq.row(r).transpose();
            rhs(n + r) = beq(r) - Aeq.row(r).dot(x);
        }
        for (int r = 0; r < w; ++r) {
            const int row = working[r];
            kkt.block(n + me + r, 0, 1, n) = A.row(row);
            kkt.block(0, n + me + r, n, 1) = A.row(row).transpose();
            rhs(n + me + r) = b(row) - A.row(row).dot(x);
        }
        const Vec sol = kkt.fullPivLu().solve(rhs);
        if (!sol.allFinite()) throw SolverError("active-set QP: singular KKT system", it);
        const Vec p = sol.head(n);
        const Vec mu = sol.tail(k);

        // With a nearly singular H the step along flat directions is solver
        // noise; it is negligible once it would not lower the objective.
        const Vec g = qp.H * x + qp.c;
        const double f = 0.5 * x.dot(qp.H * x) + qp.c.dot(x);
        const double decrease = -(g.dot(p) + 0.5 * p.dot(qp.H * p));
        const bool tiny = p.norm() <= opts.tol * (1.0 + x.norm());
        if (tiny || decrease <= 1e-13 * (1.0 + std::abs(f))) {
            if (tiny) x += p;
            int drop = -1;
            double most_negative = -1e-12;
            for (int r = 0; r < w; ++r) {
                if (mu(me + r) < most_negative) {
                    most_negative = mu(me + r);
                    drop = r;
                }
            }
            if (drop < 0) break;
            working.erase(working.begin() + drop);
            continue;
        }

        // Rows spanned by the working normals would make the KKT matrix singular.
        Mat W(me + w, n);
        for (int r = 0; r < me; ++r) W.row(r) = Aeq.row(r);
        for (int r = 0; r < w; ++r) W.row(me + r) = A.row(working[r]);
        Eigen::CompleteOrthogonalDecomposition<Mat> span;
        if (W.rows() > 0) span.compute(W.transpose());
        auto dependent = [&](int row) {
            if (W.rows() == 0) return false;
            const Vec a = A.row(row).transpose();
            const Vec coef = span.solve(a);
            return (W.transpose() * coef - a).norm() <= 1e-9 * a.norm();
        };

        double alpha = 1.0;
        int block = -1;
        for (int row = 0; row < m; ++row) {
            if (std::find(working.begin(), working.end(), row) != working.end()) continue;
            const double ap = A.row(row).dot(p);
            if (ap <= 1e-14 * (1.0 + p.norm())) continue;
            if (dependent(row)) continue;
            const double step = std::max(0.0, (b(row) - A.row(row).dot(x)) / ap);
            if (step < alpha) {
                alpha = step;
                block = row;
            }
        }
        x += alpha * p;
        if (block >= 0) working.push_back(block);
    }

    out.x = x;
    out.objective = 0.5 * x.dot(qp.H * x) + qp.c.dot(x);
    return out;
}

}  // namespace colsafe
