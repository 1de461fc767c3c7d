#include "colsafe/formation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "colsafe/errors.hpp"
#include "colsafe/qp.hpp"

namespace colsafe {

FormationGraph::FormationGraph(std::vector<double> masses, std::vector<Spring> springs)
    : mass_(std::move(masses)), springs_(std::move(springs)), adj_(mass_.size()), edge_index_(mass_.size()) {
    const auto n = static_cast<AgentId>(mass_.size());
    for (double m : mass_)
        if (!(m > 0)) throw ContractError("FormationGraph: masses must be positive");
    for (std::size_t e = 0; e < springs_.size(); ++e) {
        const Spring& s = springs_[e];
        if (s.i < 0 || s.j < 0 || s.i >= n || s.j >= n || s.i == s.j)
            throw ContractError("FormationGraph: bad edge endpoints");
        if (!(s.k > 0) || !(s.R > 0) || !(s.b >= 0))
            throw ContractError("FormationGraph: k and R must be positive, b nonnegative");
        auto& ai = adj_[static_cast<std::size_t>(s.i)];
        if (std::find(ai.begin(), ai.end(), s.j) != ai.end()) throw ContractError("FormationGraph: duplicate edge");
        ai.push_back(s.j);
        adj_[static_cast<std::size_t>(s.j)].push_back(s.i);
        edge_index_[static_cast<std::size_t>(s.i)].push_back(e);
        edge_index_[static_cast<std::size_t>(s.j)].push_back(e);
    }
    for (std::size_t i = 0; i < adj_.size(); ++i) {
        std::vector<std::size_t> order(adj_[i].size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return adj_[i][a] < adj_[i][b]; });
        std::vector<AgentId> a;
        std::vector<std::size_t> e;
        for (std::size_t o : order) {
            a.push_back(adj_[i][o]);
            e.push_back(edge_index_[i][o]);
        }
        adj_[i] = std::move(a);
        edge_index_[i] = std::move(e);
    }
}

Spring FormationGraph::edge(AgentId i, AgentId j) const {
    const auto& a = neighbors(i);
    const auto it = std::find(a.begin(), a.end(), j);
    if (it == a.end()) throw ContractError("FormationGraph::edge: agents are not connected");
    Spring s = springs_[edge_index_[static_cast<std::size_t>(i)][static_cast<std::size_t>(it - a.begin())]];
    if (s.i != i) std::swap(s.i, s.j);
    return s;
}

std::size_t FormationGraph::max_degree() const {
    std::size_t d = 0;
    for (const auto& a : adj_) d = std::max(d, a.size());
    return d;
}

bool FormationGraph::is_tree() const {
    const std::size_t n = size();
    if (n == 0 || springs_.size() != n - 1) return false;
    std::vector<bool> seen(n, false);
    std::vector<AgentId> stack{0};
    seen[0] = true;
    std::size_t count = 1;
    while (!stack.empty()) {
        const AgentId i = stack.back();
        stack.pop_back();
        for (AgentId j : neighbors(i))
            if (!seen[static_cast<std::size_t>(j)]) {
                seen[static_cast<std::size_t>(j)] = true;
                ++count;
                stack.push_back(j);
            }
    }
    return count == n;
}

Vec2 formation_control(AgentId i, const std::vector<AgentState>& x, const FormationGraph& graph) {
    const AgentState& xi = x.at(static_cast<std::size_t>(i));
    Vec2 force = Vec2::Zero();
    for (AgentId j : graph.neighbors(i)) {
        const Spring s = graph.edge(i, j);
        const Vec2 e = xi.p - x.at(static_cast<std::size_t>(j)).p;
        const double L = e.norm();
        if (L == 0.0) throw ContractError("formation_control: connected agents coincide");
        force += -s.k * (L - s.R) * (e / L) - s.b * xi.v;
    }
    return force / graph.mass(i);
}

Vec2 FormationModel::u_f(AgentId i, const std::vector<AgentState>& x) const {
    Vec2 u = formation_control(i, x, graph);
    if (!drive.empty()) u += drive.at(static_cast<std::size_t>(i));
    return u;
}

std::vector<Vec2> FormationModel::u_f_all(const std::vector<AgentState>& x) const {
    std::vector<Vec2> out;
    out.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out.push_back(u_f(static_cast<AgentId>(i), x));
    return out;
}

Neighborhood build_neighborhood(AgentId i, const std::vector<AgentState>& x, const std::vector<Vec2>& u_f,
                                const FormationGraph& graph) {
    Neighborhood nb;
    nb.id = i;
    nb.self = x.at(static_cast<std::size_t>(i));
    nb.u_f = u_f.at(static_cast<std::size_t>(i));
    const double m = graph.mass(i);
    double damping = 0.0;
    for (AgentId j : graph.neighbors(i)) {
        const Spring s = graph.edge(i, j);
        const Vec2 e = nb.self.p - x.at(static_cast<std::size_t>(j)).p;
        const double L = e.norm();
        if (L == 0.0) throw ContractError("build_neighborhood: connected agents coincide");
        // d/dp_i of -k (L - R) e / L
        const Mat2 K = (s.k / m) * ((1.0 - s.R / L) * Mat2::Identity() + (s.R / (L * L * L)) * e * e.transpose());
        nb.duf_dp -= K;
        damping += s.b;

        NeighborTerm t;
        t.id = j;
        t.state = x.at(static_cast<std::size_t>(j));
        t.u_f = u_f.at(static_cast<std::size_t>(j));
        t.duf_dp = K;
        t.duf_dv = Mat2::Zero();
        nb.neighbors.push_back(t);
    }
    nb.duf_dv = -(damping / m) * Mat2::Identity();
    return nb;
}

Polytope safety_control_set(const Vec2& u_f, const Polytope& U) {
    if (U.dim() != 2) throw ContractError("safety_control_set: U must be planar");
    // u_f - u_s in U  <=>  -G u_s <= l - G u_f
    const Polytope shifted(-U.G, U.l - U.G * u_f);
    const Polytope both = intersect(U, shifted);
    if (!is_empty(both)) return both;
    return shifted;
}

Polytope velocity_to_accel(const Polytope& U_v, double tau_interval) {
    if (!(tau_interval > 0)) throw ContractError("velocity_to_accel: tau must be positive");
    return Polytope(U_v.G, U_v.l / tau_interval);
}

CbfRow cbf_row(const AgentState& x, const Vec2& u_f, const Obstacle& o, const ClassKGains& gains) {
    const LieDerivatives ld = lie_derivatives(x, u_f, o, gains);
    CbfRow r;
    r.obstacle = o.id;
    r.distance = (x.p - o.p).norm();
    r.Lf_phi1 = ld.Lf_phi1;
    r.Lg_phi1 = ld.Lg_phi1;
    r.phi1 = phi1(x, o, gains);
    return r;
}

namespace {

std::optional<Vec2> filter_qp(const std::vector<const CbfRow*>& rows, const Polytope& U, const ClassKGains& gains) {
    Polytope P = U;
    for (const CbfRow* r : rows) P.add_halfspace(r->Lg_phi1.transpose(), r->Lf_phi1 + gains.alpha1 * r->phi1);
    const auto start = feasible_point(P);
    if (!start) return std::nullopt;
    QpProblem qp;
    qp.H = Mat::Identity(2, 2);
    qp.c = Vec::Zero(2);
    qp.A = P.G;
    qp.b = P.l;
    return Vec2(solve_qp(qp, *start).x);
}

}  // namespace

FilterResult safety_filter(const std::vector<CbfRow>& rows, const Polytope& U_bar, const Polytope& fallback,
                           const ClassKGains& gains) {
    std::vector<const CbfRow*> active;
    for (const auto& r : rows) active.push_back(&r);
    // farthest last, so relaxation pops from the back
    std::stable_sort(active.begin(), active.end(), [](const CbfRow* a, const CbfRow* b) {
        if (a->distance != b->distance) return a->distance < b->distance;
        return a->obstacle < b->obstacle;
    });

    FilterResult out;
    if (auto u = filter_qp(active, U_bar, gains)) {
        out.u_s = *u;
        return out;
    }
    out.relaxed_set = true;
    while (true) {
        if (auto u = filter_qp(active, fallback, gains)) {
            out.u_s = *u;
            return out;
        }
        if (active.empty()) throw ContractError("safety_filter: fallback control set is empty");
        out.dropped.push_back(active.back()->obstacle);
        active.pop_back();
    }
}

std::vector<AgentState> step(const std::vector<AgentState>& x, const std::vector<Vec2>& u_s, double dt,
                             const FormationModel& model) {
    if (!(dt > 0)) throw ContractError("step: dt must be positive");
    if (u_s.size() != x.size()) throw ContractError("step: one control per agent required");
    const std::size_t n = x.size();
    using Deriv = std::vector<AgentState>;  // (dp, dv)
    auto deriv = [&](const std::vector<AgentState>& s) {
        Deriv d(n);
        for (std::size_t i = 0; i < n; ++i) {
            d[i].p = s[i].v;
            d[i].v = model.u_f(static_cast<AgentId>(i), s) - u_s[i];
        }
        return d;
    };
    auto axpy = [&](const std::vector<AgentState>& s, const Deriv& d, double h) {
        std::vector<AgentState> out(n);
        for (std::size_t i = 0; i < n; ++i) {
            out[i].p = s[i].p + h * d[i].p;
            out[i].v = s[i].v + h * d[i].v;
        }
        return out;
    };
    const Deriv k1 = deriv(x);
    const Deriv k2 = deriv(axpy(x, k1, dt / 2));
    const Deriv k3 = deriv(axpy(x, k2, dt / 2));
    const Deriv k4 = deriv(axpy(x, k3, dt));
    std::vector<AgentState> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i].p = x[i].p + dt / 6 * (k1[i].p + 2 * k2[i].p + 2 * k3[i].p + k4[i].p);
        out[i].v = x[i].v + dt / 6 * (k1[i].v + 2 * k2[i].v + 2 * k3[i].v + k4[i].v);
    }
    return out;
}

void advance_obstacles(std::vector<Obstacle>& obstacles, double dt) {
    for (auto& o : obstacles) o.p += dt * o.v;
}

double energy(const std::vector<AgentState>& x, const FormationGraph& graph) {
    double E = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) E += 0.5 * graph.mass(static_cast<AgentId>(i)) * x[i].v.squaredNorm();
    for (const Spring& s : graph.springs()) {
        const double L = (x.at(static_cast<std::size_t>(s.i)).p - x.at(static_cast<std::size_t>(s.j)).p).norm();
        E += 0.5 * s.k * (L - s.R) * (L - s.R);
    }
    return E;
}

}  // namespace colsafe
