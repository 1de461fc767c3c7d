#pragma once

#include <vector>

#include "colsafe/types.hpp"

namespace colsafe {

/// Planar point agent: x_i = [p, v].
struct AgentState {
    Vec2 p = Vec2::Zero();
    Vec2 v = Vec2::Zero();
};

struct Obstacle {
    ObstacleId id = 0;
    Vec2 p = Vec2::Zero();
    Vec2 v = Vec2::Zero();  // zero for static obstacles
    double r = 1.0;         // minimum clearance radius
};

/// Linear class-K gains alpha(z) = alpha * z for each level of the chain.
struct ClassKGains {
    double alpha0 = 1.0;
    double alpha1 = 1.0;
    double alpha2 = 1.0;

    double beta() const { return alpha1 + alpha2; }
    void validate() const;
};

/// h = |p - p_o|^2 - r^2, nonnegative when safe.
double h(const AgentState& x, const Obstacle& o);

/// First chain level: 2 v.(p - p_o) + alpha0 h. Obstacle velocity is not
/// part of the condition.
double phi1(const AgentState& x, const Obstacle& o, const ClassKGains& gains);

struct LieDerivatives {
    double Lf_phi1 = 0;                 // along the formation drift
    RowVec2 Lg_phi1 = RowVec2::Zero();  // along the acceleration channel g (not g-bar)
};

/// Closed-form Lie derivatives of phi1 for the double-integrator agent driven
/// by formation acceleration u_f. Control enters the safety-filtered dynamics
/// through g-bar = -g, so the u_s coefficient of d(phi1)/dt is -Lg_phi1.
LieDerivatives lie_derivatives(const AgentState& x, const Vec2& u_f, const Obstacle& o,
                               const ClassKGains& gains);

/// phi2 = d(phi1)/dt + alpha1 phi1 under the safety modification u_s.
double phi2(const AgentState& x, const Vec2& u_f, const Obstacle& o, const ClassKGains& gains,
            const Vec2& u_s);

/// First-order sensitivities of the formation law u_f(x) around agent i.
/// The generic chain only needs these Jacobians, not the law itself.
struct NeighborTerm {
    AgentId id = 0;
    AgentState state;
    Vec2 u_f = Vec2::Zero();      // neighbor's own formation acceleration
    Mat2 duf_dp = Mat2::Zero();   // d u_f,i / d p_j
    Mat2 duf_dv = Mat2::Zero();   // d u_f,i / d v_j
};

struct Neighborhood {
    AgentId id = 0;
    AgentState self;
    Vec2 u_f = Vec2::Zero();
    Mat2 duf_dp = Mat2::Zero();  // d u_f,i / d p_i
    Mat2 duf_dv = Mat2::Zero();  // d u_f,i / d v_i
    std::vector<NeighborTerm> neighbors;  // ascending id
};

/// Stacked highest-order condition Phi = A u_N + D d(u) + B u + q, one row per
/// active obstacle (ascending obstacle id). A is expressed in the neighbor
/// velocity-control surrogate; converting it to acceleration units is the
/// caller's job.
struct CapabilityStack {
    std::vector<ObstacleId> obstacle_ids;  // row order
    std::vector<AgentId> neighbor_ids;     // block-column order
    Mat A;  // K x 2|N|
    Mat D;  // K x 2
    Mat B;  // K x 2
    Vec q;  // K

    Eigen::Index rows() const { return q.size(); }
    /// K x 2 block of A belonging to `neighbor`.
    Mat block(AgentId neighbor) const;
    /// Evaluate Phi for stacked neighbor controls (ascending neighbor order).
    Vec evaluate(const Vec& u_neighbors, const Vec2& du, const Vec2& u) const;
};

/// Drift-only derivative L_fbar phi1 of the neighborhood, with sensitivities.
/// Exposed for the finite-difference checks.
struct ChainTerms {
    double phi1 = 0;
    double Lf_phi1 = 0;
    RowVec2 dpsi_dp = RowVec2::Zero();  // gradient of L_fbar phi1 w.r.t. p_i
    RowVec2 dpsi_dv = RowVec2::Zero();  // ... w.r.t. v_i
};
ChainTerms chain_terms(const Neighborhood& nb, const Obstacle& o, const ClassKGains& gains);

CapabilityStack capability_stack(const Neighborhood& nb, std::vector<Obstacle> obstacles,
                                 const ClassKGains& gains);

}  // namespace colsafe
