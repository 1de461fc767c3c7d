#pragma once

#include <optional>

#include "colsafe/types.hpp"

namespace colsafe {

/// Default membership / feasibility tolerance (absolute, in units of G*u - l).
inline constexpr double kMembershipTol = 1e-9;

/// Regularization weight on the stacked closest-point variable. Makes the
/// minimizer unique; on parallel faces it selects the minimum-norm pair.
inline constexpr double kClosestPointReg = 1e-10;

/// Halfspace intersection {u : G u - l <= 0}. Zero rows is the whole space.
struct Polytope {
    Mat G;
    Vec l;

    Polytope() = default;
    Polytope(Mat g, Vec offsets);

    static Polytope whole_space(Eigen::Index dim);
    static Polytope box(const Vec& lower, const Vec& upper);
    /// {u : |u|_inf <= radius}
    static Polytope linf_ball(Eigen::Index dim, double radius);
    /// {u : a^T u >= offset}, the "request" orientation used by the protocol.
    static Polytope at_least(const Vec& a, double offset);

    Eigen::Index dim() const { return G.cols(); }
    Eigen::Index rows() const { return G.rows(); }

    void add_halfspace(const Vec& normal, double offset);
    /// Largest component of G u - l, or -inf for the whole space.
    double max_violation(const Vec& u) const;
};

bool contains(const Polytope& P, const Vec& u, double tol = kMembershipTol);

/// Row-wise concatenation. Membership in the result iff membership in both.
Polytope intersect(const Polytope& P1, const Polytope& P2);

/// Minimizes the largest constraint violation; returns that point if the
/// violation is within tol, std::nullopt otherwise.
std::optional<Vec> feasible_point(const Polytope& P, double tol = kMembershipTol);

bool is_empty(const Polytope& P, double tol = kMembershipTol);

struct ClosestPoints {
    Vec z1;
    Vec z2;
    double dist = 0;
};

/// Pair (z1 in P1, z2 in P2) minimizing |z1 - z2|_2. Both sets must be nonempty.
ClosestPoints closest_points(const Polytope& P1, const Polytope& P2, double tol = kMembershipTol);

/// Euclidean projection of `point` onto a nonempty polytope.
Vec project(const Polytope& P, const Vec& point, double tol = kMembershipTol);

/// Closest point to `u_prev` on (boundary of P) intersected with R. The
/// boundary is handled facet by facet; ties go to the lowest facet index.
Vec project_onto_boundary_region(const Polytope& P, const Polytope& R, const Vec& u_prev,
                                 double tol = kMembershipTol);

}  // namespace colsafe
