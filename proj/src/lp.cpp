#include "colsafe/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "colsafe/errors.hpp"

namespace colsafe {
namespace {

class Tableau {
public:
    // rows 0..m-1 are constraints, row m is the objective (reduced costs).
    Tableau(int m, int ncols) : m_(m), ncols_(ncols), t_(Mat::Zero(m + 1, ncols + 1)), basis_(m, -1) {}

    double& at(int r, int c) { return t_(r, c); }
    double rhs(int r) const { return t_(r, ncols_); }
    int basis(int r) const { return basis_[r]; }
    void set_basis(int r, int col) { basis_[r] = col; }
    int rows() const { return m_; }
    int cols() const { return ncols_; }

    // Load objective row for "minimize cost^T y": store c_B^T T - cost.
    void load_objective(const Vec& cost) {
        t_.row(m_).setZero();
        t_.row(m_).head(ncols_) = -cost.transpose();
        for (int r = 0; r < m_; ++r) {
            const double cb = cost(basis_[r]);
            if (cb != 0.0) t_.row(m_) += cb * t_.row(r);
        }
    }

    double objective_value() const { return t_(m_, ncols_); }

    void pivot(int pr, int pc) {
        t_.row(pr) /= t_(pr, pc);
        for (int r = 0; r <= m_; ++r) {
            if (r == pr) continue;
            const double f = t_(r, pc);
            if (f != 0.0) t_.row(r) -= f * t_.row(pr);
        }
        basis_[pr] = pc;
    }

    // Returns false if unbounded. `allowed` masks columns that may enter.
    enum class Outcome { Optimal, Unbounded };
    Outcome optimize(const std::vector<bool>& allowed, double tol, int& iterations, int cap) {
        for (;;) {
            int enter = -1;
            for (int c = 0; c < ncols_; ++c) {
                if (allowed[c] && t_(m_, c) > tol) {
                    enter = c;
                    break;
                }
            }
            if (enter < 0) return Outcome::Optimal;

            int leave = -1;
            double best = std::numeric_limits<double>::infinity();
            for (int r = 0; r < m_; ++r) {
                const double a = t_(r, enter);
                if (a <= tol) continue;
                // round-off can leave a basic value a hair below zero
                const double ratio = std::max(0.0, t_(r, ncols_)) / a;
                if (leave < 0) {
                    best = ratio;
                    leave = r;
                    continue;
                }
                const double tie = 1e-12 * std::max(1.0, best);
                if (ratio < best - tie || (ratio <= best + tie && basis_[r] < basis_[leave])) {
                    best = ratio;
                    leave = r;
                }
            }
            if (leave < 0) return Outcome::Unbounded;
            pivot(leave, enter);
            if (++iterations > cap) throw SolverError("simplex iteration cap reached", iterations);
        }
    }

private:
    int m_;
    int ncols_;
    Mat t_;
    std::vector<int> basis_;
};

}  // namespace

LpResult solve_lp(const Vec& c, const Mat& A, const Vec& b, const LpOptions& opts) {
    const int n = static_cast<int>(c.size());
    const int m = static_cast<int>(A.rows());
    if (A.cols() != n || b.size() != m) throw ContractError("solve_lp: dimension mismatch");

    LpResult result;
    if (m == 0) {
        // No constraints: bounded only if c == 0.
        result.x = Vec::Zero(n);
        result.status = c.isZero() ? LpStatus::Optimal : LpStatus::Unbounded;
        return result;
    }

    std::vector<int> art_row;
    for (int i = 0; i < m; ++i)
        if (b(i) < 0) art_row.push_back(i);
    const int n_art = static_cast<int>(art_row.size());
    // Columns: [x+ (n) | x- (n) | slack (m) | artificial (n_art)]
    const int ncols = 2 * n + m + n_art;
    const int art0 = 2 * n + m;

    Tableau tab(m, ncols);
    int k = 0;
    for (int i = 0; i < m; ++i) {
        const double sign = b(i) < 0 ? -1.0 : 1.0;
        for (int j = 0; j < n; ++j) {
            tab.at(i, j) = sign * A(i, j);
            tab.at(i, n + j) = -sign * A(i, j);
        }
        tab.at(i, 2 * n + i) = sign;
        tab.at(i, ncols) = sign * b(i);
        if (b(i) < 0) {
            tab.at(i, art0 + k) = 1.0;
            tab.set_basis(i, art0 + k);
            ++k;
        } else {
            tab.set_basis(i, 2 * n + i);
        }
    }

    const int cap = opts.max_iterations > 0 ? opts.max_iterations : 200 * (m + n) + 1000;
    std::vector<bool> allowed(ncols, true);

    if (n_art > 0) {
        Vec phase1 = Vec::Zero(ncols);
        phase1.tail(n_art).setOnes();
        tab.load_objective(phase1);
        tab.optimize(allowed, opts.pivot_tol, result.iterations, cap);
        const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
        if (tab.objective_value() > opts.feas_tol * scale) {
            result.status = LpStatus::Infeasible;
            return result;
        }
        // Drive zero-level artificials out of the basis where possible.
        for (int r = 0; r < m; ++r) {
            if (tab.basis(r) < art0) continue;
            for (int col = 0; col < art0; ++col) {
                if (std::abs(tab.at(r, col)) > opts.pivot_tol) {
                    tab.pivot(r, col);
                    break;
                }
            }
        }
        for (int col = art0; col < ncols; ++col) allowed[col] = false;
    }

    Vec cost = Vec::Zero(ncols);
    cost.head(n) = c;
    cost.segment(n, n) = -c;
    tab.load_objective(cost);
    if (tab.optimize(allowed, opts.pivot_tol, result.iterations, cap) == Tableau::Outcome::Unbounded) {
        result.status = LpStatus::Unbounded;
        return result;
    }

    Vec y = Vec::Zero(ncols);
    for (int r = 0; r < m; ++r) y(tab.basis(r)) = tab.rhs(r);
    result.x = y.head(n) - y.segment(n, n);
    result.objective = c.dot(result.x);
    result.status = LpStatus::Optimal;
    return result;
}

}  // namespace colsafe
