#include <doctest.h>

#include "colsafe/errors.hpp"
#include "colsafe/lp.hpp"
#include "colsafe/polytope.hpp"

using namespace colsafe;

TEST_SUITE("polytope") {

TEST_CASE("membership in the control box") {
    const Polytope P = Polytope::linf_ball(2, 20.0);
    CHECK(contains(P, Vec2(0, 0)));
    CHECK(contains(P, Vec2(20, 20), 0.0));
    CHECK_FALSE(contains(P, Vec2(21, 0)));
    CHECK_THROWS_AS(contains(P, Vec::Zero(3)), ContractError);
}

TEST_CASE("intersection") {
    Polytope a = Polytope::whole_space(1), b = Polytope::whole_space(1);
    a.add_halfspace(Vec::Constant(1, 1.0), 1.0);   // x <= 1
    b.add_halfspace(Vec::Constant(1, -1.0), 0.0);  // x >= 0
    const Polytope s = intersect(a, b);
    CHECK(contains(s, Vec::Constant(1, 0.5)));
    CHECK_FALSE(contains(s, Vec::Constant(1, 1.5)));
    CHECK_FALSE(contains(s, Vec::Constant(1, -0.5)));

    const Polytope box = Polytope::linf_ball(2, 1.0);
    const Polytope same = intersect(Polytope::whole_space(2), box);
    CHECK(same.rows() == box.rows());
}

TEST_CASE("emptiness") {
    Polytope p = Polytope::whole_space(1);
    p.add_halfspace(Vec::Constant(1, 1.0), -1.0);  // x <= -1
    p.add_halfspace(Vec::Constant(1, -1.0), -1.0); // x >= 1
    CHECK(is_empty(p));
    CHECK_FALSE(is_empty(Polytope::linf_ball(2, 20.0)));
}

TEST_CASE("closest points of boxes") {
    const Polytope a = Polytope::box(Vec2(0, 0), Vec2(1, 1));
    const Polytope b = Polytope::box(Vec2(2, 2), Vec2(3, 3));
    const ClosestPoints cp = closest_points(a, b);
    CHECK((cp.z1 - Vec2(1, 1)).norm() < 1e-6);
    CHECK((cp.z2 - Vec2(2, 2)).norm() < 1e-6);
    CHECK(cp.dist == doctest::Approx(std::sqrt(2.0)).epsilon(1e-8));
    CHECK(closest_points(a, a).dist == doctest::Approx(0.0));

    Polytope empty = Polytope::whole_space(2);
    empty.add_halfspace(Vec2(1, 0), -1.0);
    empty.add_halfspace(Vec2(-1, 0), -1.0);
    CHECK_THROWS_AS(closest_points(a, empty), ContractError);
}

TEST_CASE("projection onto the boundary inside a region") {
    const Polytope P = Polytope::linf_ball(2, 1.0);
    CHECK((project_onto_boundary_region(P, Polytope::at_least(Vec2(1, 0), 0.5), Vec2(2, 0)) - Vec2(1, 0)).norm() <
          1e-6);
    CHECK((project_onto_boundary_region(P, Polytope::whole_space(2), Vec2(0, 3)) - Vec2(0, 1)).norm() < 1e-6);
    CHECK((project_onto_boundary_region(P, Polytope::at_least(Vec2(1, 1), 2.0), Vec2(0, 0)) - Vec2(1, 1)).norm() <
          1e-6);
    CHECK_THROWS_AS(project_onto_boundary_region(P, Polytope::at_least(Vec2(1, 0), 3.0), Vec2(0, 0)), ContractError);
}

TEST_CASE("simplex on a small LP") {
    // max x + y  s.t.  x + 2y <= 4, 3x + y <= 6, x, y >= 0
    Mat A(4, 2);
    A << 1, 2, 3, 1, -1, 0, 0, -1;
    const Vec b = (Vec(4) << 4, 6, 0, 0).finished();
    const LpResult r = solve_lp(Vec2(-1, -1), A, b);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.x(0) == doctest::Approx(1.6));
    CHECK(r.x(1) == doctest::Approx(1.2));
}

}
