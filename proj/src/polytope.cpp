#include "colsafe/polytope.hpp"

#include <cmath>
#include <limits>

#include "colsafe/errors.hpp"
#include "colsafe/lp.hpp"
#include "colsafe/qp.hpp"

namespace colsafe {

Polytope::Polytope(Mat g, Vec offsets) : G(std::move(g)), l(std::move(offsets)) {
    if (G.rows() != l.size()) throw ContractError("Polytope: G rows and l size differ");
}

Polytope Polytope::whole_space(Eigen::Index dim) { return Polytope(Mat(0, dim), Vec(0)); }

Polytope Polytope::box(const Vec& lower, const Vec& upper) {
    const Eigen::Index n = lower.size();
    if (upper.size() != n) throw ContractError("Polytope::box: bound sizes differ");
    Mat G(2 * n, n);
    Vec l(2 * n);
    G.topRows(n) = Mat::Identity(n, n);
    G.bottomRows(n) = -Mat::Identity(n, n);
    l << upper, -lower;
    return Polytope(std::move(G), std::move(l));
}

Polytope Polytope::linf_ball(Eigen::Index dim, double radius) {
    return box(Vec::Constant(dim, -radius), Vec::Constant(dim, radius));
}

Polytope Polytope::at_least(const Vec& a, double offset) {
    Polytope P = whole_space(a.size());
    P.add_halfspace(-a, -offset);
    return P;
}

void Polytope::add_halfspace(const Vec& normal, double offset) {
    if (normal.size() != dim()) throw ContractError("add_halfspace: dimension mismatch");
    G.conservativeResize(G.rows() + 1, Eigen::NoChange);
    G.row(G.rows() - 1) = normal.transpose();
    l.conservativeResize(l.size() + 1);
    l(l.size() - 1) = offset;
}

double Polytope::max_violation(const Vec& u) const {
    if (u.size() != dim()) throw ContractError("Polytope: point dimension does not match");
    if (rows() == 0) return -std::numeric_limits<double>::infinity();
    return (G * u - l).maxCoeff();
}

bool contains(const Polytope& P, const Vec& u, double tol) { return P.max_violation(u) <= tol; }

Polytope intersect(const Polytope& P1, const Polytope& P2) {
    if (P1.dim() != P2.dim()) throw ContractError("intersect: ambient dimensions differ");
    Mat G(P1.rows() + P2.rows(), P1.dim());
    Vec l(G.rows());
    G << P1.G, P2.G;
    l << P1.l, P2.l;
    return Polytope(std::move(G), std::move(l));
}

std::optional<Vec> feasible_point(const Polytope& P, double tol) {
    const Eigen::Index n = P.dim();
    const Eigen::Index m = P.rows();
    if (m == 0) return Vec::Zero(n);
    // variables (u, t): minimize t  s.t.  G u - t <= l,  -t <= 1
    Mat A = Mat::Zero(m + 1, n + 1);
    Vec b(m + 1);
    A.topLeftCorner(m, n) = P.G;
    A.block(0, n, m, 1).setConstant(-1.0);
    A(m, n) = -1.0;
    b << P.l, 1.0;
    Vec c = Vec::Zero(n + 1);
    c(n) = 1.0;
    const LpResult lp = solve_lp(c, A, b);
    if (lp.status != LpStatus::Optimal)
        throw SolverError("feasibility LP returned a non-optimal status", lp.iterations);
    if (lp.x(n) > tol) return std::nullopt;
    return Vec(lp.x.head(n));
}

bool is_empty(const Polytope& P, double tol) { return !feasible_point(P, tol).has_value(); }

ClosestPoints closest_points(const Polytope& P1, const Polytope& P2, double tol) {
    if (P1.dim() != P2.dim()) throw ContractError("closest_points: ambient dimensions differ");
    const auto s1 = feasible_point(P1, tol);
    const auto s2 = feasible_point(P2, tol);
    if (!s1 || !s2) throw ContractError("closest_points: input set is empty");

    const Eigen::Index n = P1.dim();
    QpProblem qp;
    qp.H = Mat::Zero(2 * n, 2 * n);
    qp.H.topLeftCorner(n, n) = Mat::Identity(n, n);
    qp.H.bottomRightCorner(n, n) = Mat::Identity(n, n);
    qp.H.topRightCorner(n, n) = -Mat::Identity(n, n);
    qp.H.bottomLeftCorner(n, n) = -Mat::Identity(n, n);
    qp.H += kClosestPointReg * Mat::Identity(2 * n, 2 * n);
    qp.c = Vec::Zero(2 * n);
    qp.A = Mat::Zero(P1.rows() + P2.rows(), 2 * n);
    qp.A.topLeftCorner(P1.rows(), n) = P1.G;
    qp.A.bottomRightCorner(P2.rows(), n) = P2.G;
    qp.b = Vec(P1.rows() + P2.rows());
    qp.b << P1.l, P2.l;

    // Start from the feasibility points, nudged to satisfy the constraints exactly if needed.
    Vec start(2 * n);
    start << *s1, *s2;
    const QpResult r = solve_qp(qp, start);

    ClosestPoints out;
    out.z1 = r.x.head(n);
    out.z2 = r.x.tail(n);
    out.dist = (out.z1 - out.z2).norm();
    return out;
}

Vec project(const Polytope& P, const Vec& point, double tol) {
    if (point.size() != P.dim()) throw ContractError("project: dimension mismatch");
    const auto start = feasible_point(P, tol);
    if (!start) throw ContractError("project: target set is empty");
    QpProblem qp;
    qp.H = Mat::Identity(P.dim(), P.dim());
    qp.c = -point;
    qp.A = P.G;
    qp.b = P.l;
    return solve_qp(qp, *start).x;
}

Vec project_onto_boundary_region(const Polytope& P, const Polytope& R, const Vec& u_prev, double tol) {
    if (P.dim() != R.dim() || u_prev.size() != P.dim())
        throw ContractError("project_onto_boundary_region: dimension mismatch");
    const Polytope region = intersect(P, R);

    std::optional<Vec> best;
    double best_dist = std::numeric_limits<double>::infinity();
    for (Eigen::Index f = 0; f < P.rows(); ++f) {
        const Vec normal = P.G.row(f).transpose();
        if (normal.norm() == 0.0) continue;
        Polytope facet = region;
        facet.add_halfspace(-normal, -P.l(f));  // together with row f: equality
        if (is_empty(facet, tol)) continue;

        QpProblem qp;
        qp.H = Mat::Identity(P.dim(), P.dim());
        qp.c = -u_prev;
        qp.A = region.G;
        qp.b = region.l;
        qp.Aeq = normal.transpose();
        qp.beq = Vec::Constant(1, P.l(f));
        Vec candidate;
        try {
            candidate = solve_qp(qp).x;
        } catch (const ContractError&) {
            continue;  // feasible only within tolerance
        }
        const double d = (candidate - u_prev).norm();
        if (d < best_dist - 1e-12) {
            best_dist = d;
            best = std::move(candidate);
        }
    }
    if (!best) throw ContractError("project_onto_boundary_region: boundary region is empty");
    return *best;
}

}  // namespace colsafe
