#include "colsafe/barrier.hpp"

#include <algorithm>
#include <cmath>

#include "colsafe/errors.hpp"

namespace colsafe {

void ClassKGains::validate() const {
    if (!(alpha0 > 0) || !(alpha1 > 0) || !(alpha2 > 0))
        throw ContractError("class-K gains must be strictly positive");
}

double h(const AgentState& x, const Obstacle& o) { return (x.p - o.p).squaredNorm() - o.r * o.r; }

double phi1(const AgentState& x, const Obstacle& o, const ClassKGains& gains) {
    return 2.0 * x.v.dot(x.p - o.p) + gains.alpha0 * h(x, o);
}

LieDerivatives lie_derivatives(const AgentState& x, const Vec2& u_f, const Obstacle& o,
                               const ClassKGains& gains) {
    const Vec2 d = x.p - o.p;
    LieDerivatives out;
    out.Lf_phi1 = 2.0 * (x.v.dot(x.v + gains.alpha0 * d) + u_f.dot(d));
    out.Lg_phi1 = 2.0 * d.transpose();
    return out;
}

double phi2(const AgentState& x, const Vec2& u_f, const Obstacle& o, const ClassKGains& gains,
            const Vec2& u_s) {
    const LieDerivatives ld = lie_derivatives(x, u_f, o, gains);
    return ld.Lf_phi1 - ld.Lg_phi1.dot(u_s) + gains.alpha1 * phi1(x, o, gains);
}

ChainTerms chain_terms(const Neighborhood& nb, const Obstacle& o, const ClassKGains& gains) {
    const Vec2& p = nb.self.p;
    const Vec2& v = nb.self.v;
    const Vec2 d = p - o.p;
    ChainTerms t;
    t.phi1 = phi1(nb.self, o, gains);
    t.Lf_phi1 = lie_derivatives(nb.self, nb.u_f, o, gains).Lf_phi1;
    // L_fbar phi1 = 2 [v.v + a0 v.d + u_f(x).d]
    t.dpsi_dp = 2.0 * (gains.alpha0 * v + nb.u_f + nb.duf_dp.transpose() * d).transpose();
    t.dpsi_dv = 2.0 * (2.0 * v + gains.alpha0 * d + nb.duf_dv.transpose() * d).transpose();
    return t;
}

Mat CapabilityStack::block(AgentId neighbor) const {
    const auto it = std::find(neighbor_ids.begin(), neighbor_ids.end(), neighbor);
    if (it == neighbor_ids.end()) throw ContractError("CapabilityStack::block: unknown neighbor");
    const auto j = static_cast<Eigen::Index>(it - neighbor_ids.begin());
    return A.middleCols(2 * j, 2);
}

Vec CapabilityStack::evaluate(const Vec& u_neighbors, const Vec2& du, const Vec2& u) const {
    if (u_neighbors.size() != A.cols()) throw ContractError("CapabilityStack::evaluate: bad neighbor vector");
    return A * u_neighbors + D * du + B * u + q;
}

CapabilityStack capability_stack(const Neighborhood& nb, std::vector<Obstacle> obstacles,
                                 const ClassKGains& gains) {
    std::sort(obstacles.begin(), obstacles.end(),
              [](const Obstacle& a, const Obstacle& b) { return a.id < b.id; });
    const auto K = static_cast<Eigen::Index>(obstacles.size());
    const auto nN = static_cast<Eigen::Index>(nb.neighbors.size());

    CapabilityStack s;
    for (const auto& n : nb.neighbors) s.neighbor_ids.push_back(n.id);
    if (!std::is_sorted(s.neighbor_ids.begin(), s.neighbor_ids.end()))
        throw ContractError("capability_stack: neighbors must be in ascending id order");
    s.A = Mat::Zero(K, 2 * nN);
    s.D = Mat::Zero(K, 2);
    s.B = Mat::Zero(K, 2);
    s.q = Vec::Zero(K);

    const Vec2& v = nb.self.v;
    const double beta = gains.beta();
    for (Eigen::Index k = 0; k < K; ++k) {
        const Obstacle& o = obstacles[static_cast<size_t>(k)];
        s.obstacle_ids.push_back(o.id);
        const Vec2 d = nb.self.p - o.p;
        const ChainTerms t = chain_terms(nb, o, gains);

        const RowVec2 Lgbar_phi1 = -2.0 * d.transpose();     // gbar = -g on the velocity rows
        const RowVec2 Lf_Lgbar_phi1 = -2.0 * v.transpose();  // d/dt(-2 d) along the drift
        const RowVec2 Lgbar_Lf_phi1 = -t.dpsi_dv;
        const double Lf2_phi1 = t.dpsi_dp.dot(v) + t.dpsi_dv.dot(nb.u_f);

        double neighbor_drift = 0.0;
        for (Eigen::Index j = 0; j < nN; ++j) {
            const NeighborTerm& n = nb.neighbors[static_cast<size_t>(j)];
            const RowVec2 dpsi_dpj = 2.0 * (n.duf_dp.transpose() * d).transpose();
            const RowVec2 dpsi_dvj = 2.0 * (n.duf_dv.transpose() * d).transpose();
            neighbor_drift += dpsi_dpj.dot(n.state.v) + dpsi_dvj.dot(n.u_f);
            // Neighbor control modeled as acting on its velocity: gbar_j = [-I; 0].
            s.A.block(k, 2 * j, 1, 2) = -dpsi_dpj;
        }

        s.D.row(k) = Lgbar_phi1;
        s.B.row(k) = Lf_Lgbar_phi1 + Lgbar_Lf_phi1 + beta * Lgbar_phi1;
        s.q(k) = neighbor_drift + Lf2_phi1 + gains.alpha1 * gains.alpha2 * t.phi1 + beta * t.Lf_phi1;
    }
    return s;
}

}  // namespace colsafe
