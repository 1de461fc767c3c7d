#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <random>

#include "colsafe/capability.hpp"
#include "colsafe/errors.hpp"
#include "colsafe/formation.hpp"
#include "colsafe/verify.hpp"

namespace colsafe::verify {

namespace {

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

double point_segment(const Vec2& x, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double t = std::clamp((x - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    return (x - (a + t * ab)).norm();
}

double polygon_boundary_distance(const Vec2& x, const std::vector<Vec2>& Q) {
    double best = kInf;
    for (std::size_t k = 0; k < Q.size(); ++k) best = std::min(best, point_segment(x, Q[k], Q[(k + 1) % Q.size()]));
    return best;
}

/// One-sided sweep: P's boundary sampled at `spacing`, exact distance to Q's edges.
double sweep(const std::vector<Vec2>& P, const std::vector<Vec2>& Q, double spacing) {
    double best = kInf;
    for (std::size_t k = 0; k < P.size(); ++k) {
        const Vec2& a = P[k];
        const Vec2& b = P[(k + 1) % P.size()];
        const int n = std::max(1, static_cast<int>(std::ceil((b - a).norm() / spacing)));
        for (int s = 0; s <= n; ++s) best = std::min(best, polygon_boundary_distance(a + (b - a) * (double(s) / n), Q));
    }
    return best;
}

struct Polygon {
    Polytope P;
    std::vector<Vec2> vertices;  // counter-clockwise
    Vec2 center;
    double outradius = 0;  // largest vertex distance from center
};

Polygon random_polygon(std::mt19937& rng, const Vec2& center) {
    std::uniform_int_distribution<int> sides(3, 7);
    std::uniform_real_distribution<double> unit(-1.0, 1.0), off(0.5, 1.5);
    const int m = sides(rng);
    Polygon poly;
    poly.center = center;
    Mat G(m, 2);
    Vec l(m);
    for (int k = 0; k < m; ++k) {
        // jitter small enough that consecutive normals stay less than pi apart
        const double a = 2.0 * M_PI * (k + 0.2 * unit(rng)) / m;
        const Vec2 n(std::cos(a), std::sin(a));
        const double r = off(rng);
        G.row(k) = n.transpose();
        l(k) = r + n.dot(center);
    }
    poly.P = Polytope(G, l);
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            Mat2 M;
            M << G.row(i), G.row(j);
            if (std::abs(M.determinant()) < 1e-12) continue;
            const Vec2 v = M.partialPivLu().solve(Vec2(l(i), l(j)));
            if ((G * v - l).maxCoeff() <= 1e-9) poly.vertices.push_back(v);
        }
    std::sort(poly.vertices.begin(), poly.vertices.end(), [&](const Vec2& a, const Vec2& b) {
        return std::atan2(a.y() - center.y(), a.x() - center.x()) < std::atan2(b.y() - center.y(), b.x() - center.x());
    });
    // drop coincident vertices where three lines meet
    std::vector<Vec2> unique;
    for (const Vec2& v : poly.vertices)
        if (unique.empty() || (v - unique.back()).norm() > 1e-9) unique.push_back(v);
    if (unique.size() > 1 && (unique.front() - unique.back()).norm() <= 1e-9) unique.pop_back();
    poly.vertices = unique;
    for (const Vec2& v : poly.vertices) poly.outradius = std::max(poly.outradius, (v - center).norm());
    return poly;
}

void translate(Polygon& poly, const Vec2& shift) {
    poly.P.l += poly.P.G * shift;
    for (Vec2& v : poly.vertices) v += shift;
    poly.center += shift;
}

std::pair<Vec, Vec> box_bounds(const Polytope& U) {
    const Eigen::Index n = U.dim();
    Vec lo = Vec::Constant(n, -kInf), hi = Vec::Constant(n, kInf);
    for (Eigen::Index r = 0; r < U.rows(); ++r) {
        Eigen::Index d = -1;
        for (Eigen::Index c = 0; c < n; ++c)
            if (U.G(r, c) != 0) {
                if (d >= 0) throw ContractError("grid_joint_margin: control set is not a box");
                d = c;
            }
        if (d < 0) continue;
        const double g = U.G(r, d);
        if (g > 0) hi(d) = std::min(hi(d), U.l(r) / g);
        else lo(d) = std::max(lo(d), U.l(r) / g);
    }
    if (!lo.allFinite() || !hi.allFinite()) throw ContractError("grid_joint_margin: control set is unbounded");
    return {lo, hi};
}

}  // namespace

double grid_max_min(const Mat& B, const Vec& lower, const Vec& upper, double step) {
    if (B.cols() != 2) throw ContractError("grid_max_min: planar controls only");
    const int nx = static_cast<int>(std::lround((upper(0) - lower(0)) / step));
    const int ny = static_cast<int>(std::lround((upper(1) - lower(1)) / step));
    double best = -kInf;
    for (int i = 0; i <= nx; ++i) {
        const double x = lower(0) + i * step;
        for (int j = 0; j <= ny; ++j) {
            const double y = lower(1) + j * step;
            double worst = kInf;
            for (Eigen::Index k = 0; k < B.rows(); ++k) worst = std::min(worst, B(k, 0) * x + B(k, 1) * y);
            best = std::max(best, worst);
        }
    }
    return best;
}

double boundary_distance(const std::vector<Vec2>& P, const std::vector<Vec2>& Q) {
    // Each sweep overestimates by at most half the spacing.
    const double spacing = 2e-4;
    return std::min(sweep(P, Q, spacing), sweep(Q, P, spacing));
}

double grid_joint_margin(const NetworkSnapshot& net, double step) {
    const std::size_t n = net.agents.size();
    std::vector<std::vector<Vec2>> grids(n);
    std::map<AgentId, std::size_t> index;
    for (std::size_t i = 0; i < n; ++i) {
        index[net.agents[i].id] = i;
        const auto [lo, hi] = box_bounds(net.agents[i].U);
        const int nx = static_cast<int>(std::lround((hi(0) - lo(0)) / step));
        const int ny = static_cast<int>(std::lround((hi(1) - lo(1)) / step));
        for (int a = 0; a <= nx; ++a)
            for (int b = 0; b <= ny; ++b) grids[i].push_back(Vec2(lo(0) + a * step, lo(1) + b * step));
    }
    std::vector<std::size_t> odo(n, 0);
    double best = -kInf;
    while (true) {
        double worst = kInf;
        for (std::size_t i = 0; i < n; ++i) {
            const AgentProblem& a = net.agents[i];
            if (a.rows() == 0) continue;
            Vec phi = a.B * grids[i][odo[i]] + a.q;
            for (const auto& [j, A] : a.A_blocks) phi += A * grids[index.at(j)][odo[index.at(j)]];
            worst = std::min(worst, phi.minCoeff());
        }
        best = std::max(best, worst);
        std::size_t d = 0;
        while (d < n && ++odo[d] == grids[d].size()) odo[d++] = 0;
        if (d == n) break;
    }
    return best;
}

CheckResult max_min_equivalence() {
    CheckResult r{3, "max-min LP equivalence", true, ""};
    std::mt19937 rng(31);
    std::uniform_int_distribution<int> rows(1, 3), shrink(0, 150);
    std::uniform_real_distribution<double> coef(-1.0, 1.0), scale(0.2, 5.0);
    const double step = 0.1;
    double worst_gap = 0, worst_row = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const int K = rows(rng);
        Mat B(K, 2);
        const double s = scale(rng);
        for (int k = 0; k < K; ++k) B.row(k) << s * coef(rng), s * coef(rng);
        Vec lo(2), hi(2);
        for (int d = 0; d < 2; ++d) {
            lo(d) = -20.0 + step * shrink(rng);
            hi(d) = 20.0 - step * shrink(rng);
        }
        const CapabilityResult cap = max_min_capability(B, Polytope::box(lo, hi));
        const double grid = grid_max_min(B, lo, hi, step);
        double lip = 0;
        for (int k = 0; k < K; ++k) lip = std::max(lip, B.row(k).norm());
        // u* is within half a grid diagonal of some grid point
        const double allowance = lip * 0.5 * step * std::sqrt(2.0) + 1e-9;
        const double gap = cap.gamma_star - grid;
        const double row_err = std::abs((B * cap.u_star).minCoeff() - cap.gamma_star);
        worst_gap = std::max(worst_gap, std::abs(gap));
        worst_row = std::max(worst_row, row_err);
        const bool inside = (cap.u_star.array() >= lo.array() - 1e-9).all() && (cap.u_star.array() <= hi.array() + 1e-9).all();
        if (gap < -1e-9 || gap > allowance || row_err > 1e-8 || !inside) {
            r.passed = false;
            r.detail = fmt("instance %g: gamma* %.9g grid %.9g", trial, cap.gamma_star, grid);
            return r;
        }
    }
    r.detail = fmt("100 instances, max |gamma* - grid| %.3g, max |min(Bu*) - gamma*| %.3g", worst_gap, worst_row);
    return r;
}

CheckResult closest_point_oracle() {
    CheckResult r{4, "closest-point QP oracle", true, ""};
    std::mt19937 rng(47);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI), gap(0.05, 3.0), near(0.0, 0.45), pos(-5.0, 5.0);
    double worst_dist = 0, worst_fixed = 0;
    int mismatch = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const bool disjoint = trial < 100;
        const Polygon A = random_polygon(rng, Vec2(pos(rng), pos(rng)));
        const double th = angle(rng);
        const Vec2 dir(std::cos(th), std::sin(th));
        Polygon Bp = random_polygon(rng, Vec2::Zero());
        // Disjoint circumscribed discs keep the pair apart; both contain a
        // disc of radius 0.5 about their centers, so close centers overlap.
        const double sep = disjoint ? A.outradius + Bp.outradius + gap(rng) : near(rng);
        translate(Bp, A.center + sep * dir);
        const ClosestPoints cp = closest_points(A.P, Bp.P);
        const bool meets = !is_empty(intersect(A.P, Bp.P));
        if ((cp.dist <= 1e-6) != meets) ++mismatch;
        if (!disjoint) {
            if (!meets || cp.dist > 1e-6) ++mismatch;
            continue;
        }
        const double brute = boundary_distance(A.vertices, Bp.vertices);
        worst_dist = std::max(worst_dist, std::abs(cp.dist - brute));
        const double fixed = std::max((project(A.P, cp.z2) - cp.z1).norm(), (project(Bp.P, cp.z1) - cp.z2).norm());
        worst_fixed = std::max(worst_fixed, fixed);
    }
    r.passed = worst_dist <= 1e-3 && worst_fixed <= 1e-6 && mismatch == 0;
    r.detail = fmt("max |dist - brute| %.3g, max re-projection drift %.3g, zero-distance mismatches %g", worst_dist,
                   worst_fixed, mismatch);
    return r;
}

CheckResult lie_chain_consistency() {
    CheckResult r{5, "Lie-derivative chain consistency", true, ""};
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0), gain(0.5, 2.0);
    const double dt = 1e-3;
    const double tol = 10 * dt;
    double worst[3] = {0, 0, 0};
    for (int trial = 0; trial < 20; ++trial) {
        const FormationModel model{FormationGraph({0.5, 0.5}, {{0, 1, 3.0, 3.0, 1.0}}),
                                   {Vec2(5 * u(rng), 5 * u(rng)), Vec2(5 * u(rng), 5 * u(rng))}};
        const ClassKGains g{gain(rng), gain(rng), gain(rng)};
        std::vector<AgentState> x(2);
        x[0].p = Vec2(2 * u(rng), 2 * u(rng));
        x[0].v = Vec2(u(rng), u(rng));
        x[1].p = x[0].p + Vec2(3 + u(rng), u(rng));
        x[1].v = Vec2(u(rng), u(rng));
        const Obstacle o{0, x[0].p + Vec2(2.5 + u(rng), 2.5 * u(rng)), Vec2::Zero(), 1.0};
        // The neighbor's own modification must not show up before the next derivative.
        const std::vector<Vec2> us{Vec2(5 * u(rng), 5 * u(rng)), Vec2(5 * u(rng), 5 * u(rng))};

        auto h0 = [&](const std::vector<AgentState>& s) { return h(s[0], o); };
        auto h1 = [&](const std::vector<AgentState>& s) { return phi1(s[0], o, g); };
        auto h2 = [&](const std::vector<AgentState>& s) { return phi2(s[0], model.u_f(0, s), o, g, us[0]); };
        const auto x1 = step(x, us, dt, model);
        const auto x2 = step(x1, us, dt, model);
        auto ddt = [&](auto f) { return (-3 * f(x) + 4 * f(x1) - f(x2)) / (2 * dt); };

        const Vec2 d = x[0].p - o.p;
        const double hdot = 2 * d.dot(x[0].v);  // reference, written out here
        const auto uf = model.u_f_all(x);
        const LieDerivatives ld = lie_derivatives(x[0], uf[0], o, g);
        const double phi1dot = ld.Lf_phi1 - ld.Lg_phi1.dot(us[0]);
        const CapabilityStack cs = capability_stack(build_neighborhood(0, x, uf, model.graph), {o}, g);
        const double Phi = (cs.B * us[0] + cs.q)(0);

        const double e0 = std::abs(ddt(h0) - hdot);
        const double e1 = std::abs(ddt(h1) - phi1dot);
        const double e2 = std::abs(ddt(h2) + g.alpha2 * h2(x) - Phi);
        worst[0] = std::max(worst[0], e0);
        worst[1] = std::max(worst[1], e1);
        worst[2] = std::max(worst[2], e2);
        // phi2 itself is d(phi1)/dt + alpha1 phi1
        worst[1] = std::max(worst[1], std::abs(h2(x) - (phi1dot + g.alpha1 * h1(x))));
    }
    r.passed = worst[0] <= tol && worst[1] <= tol && worst[2] <= tol;
    r.detail = fmt("20 states at dt=1e-3, max errors h %.2e, phi1 %.2e, Phi %.2e", worst[0], worst[1], worst[2]);
    return r;
}

}  // namespace colsafe::verify
