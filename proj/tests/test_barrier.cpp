#include <doctest.h>

#include "colsafe/barrier.hpp"
#include "colsafe/capability.hpp"
#include "colsafe/errors.hpp"
#include "colsafe/formation.hpp"

using namespace colsafe;

namespace {
AgentState at(double px, double py, double vx = 0, double vy = 0) {
    AgentState x;
    x.p = Vec2(px, py);
    x.v = Vec2(vx, vy);
    return x;
}
const Obstacle origin{0, Vec2::Zero(), Vec2::Zero(), 1.0};
}  // namespace

TEST_SUITE("barrier") {

TEST_CASE("clearance h") {
    CHECK(h(at(3, 4), origin) == doctest::Approx(24));
    CHECK(h(at(1, 0), origin) == doctest::Approx(0));
    CHECK(h(at(0, 0), origin) == doctest::Approx(-1));
}

TEST_CASE("first chain level") {
    const ClassKGains g;
    CHECK(phi1(at(2, 0, -1, 0), origin, g) == doctest::Approx(-1));
    CHECK(phi1(at(0, 1), origin, g) == doctest::Approx(0));
}

TEST_CASE("Lie derivatives") {
    const ClassKGains g;
    const LieDerivatives ld = lie_derivatives(at(2, 0), Vec2::Zero(), origin, g);
    CHECK(ld.Lf_phi1 == doctest::Approx(0));
    CHECK(ld.Lg_phi1(0) == doctest::Approx(4));
    CHECK(ld.Lg_phi1(1) == doctest::Approx(0));
    const LieDerivatives ld2 = lie_derivatives(at(-3.5, 0, 0.3, -2), Vec2(1, 1), origin, g);
    CHECK(ld2.Lg_phi1(0) == doctest::Approx(-7));
    CHECK(ld2.Lg_phi1(1) == doctest::Approx(0));
}

TEST_CASE("second level vanishes at rest on the boundary") {
    const ClassKGains g;
    CHECK(phi2(at(1, 0), Vec2::Zero(), origin, g, Vec2::Zero()) == doctest::Approx(0));
}

TEST_CASE("capability stack shapes and row order") {
    const FormationGraph graph({0.5, 0.5}, {{0, 1, 3, 3, 1}});
    const std::vector<AgentState> x{at(0, 0), at(3, 0)};
    const std::vector<Vec2> uf{Vec2::Zero(), Vec2::Zero()};
    const Neighborhood nb = build_neighborhood(0, x, uf, graph);
    const CapabilityStack none = capability_stack(nb, {}, ClassKGains{});
    CHECK(none.rows() == 0);
    CHECK(none.A.rows() == 0);
    CHECK(none.B.rows() == 0);

    const Obstacle o7{7, Vec2(0, 3), Vec2::Zero(), 1.0};
    const Obstacle o2{2, Vec2(0, -3), Vec2::Zero(), 1.0};
    const CapabilityStack two = capability_stack(nb, {o7, o2}, ClassKGains{});
    REQUIRE(two.rows() == 2);
    CHECK(two.obstacle_ids == std::vector<ObstacleId>{2, 7});
    CHECK(two.A.cols() == 2);
}

TEST_CASE("max-min capability") {
    const Polytope U = Polytope::linf_ball(2, 20.0);
    const CapabilityResult id = max_min_capability(Mat::Identity(2, 2), U);
    CHECK(id.gamma_star == doctest::Approx(20));
    CHECK((id.u_star - Vec2(20, 20)).norm() < 1e-9);

    Mat opp(2, 2);
    opp << 1, 0, -1, 0;
    const CapabilityResult sym = max_min_capability(opp, U);
    CHECK(sym.gamma_star == doctest::Approx(0).epsilon(1e-12));
    CHECK(std::abs(sym.u_star(0)) < 1e-9);

    CHECK_THROWS_AS(max_min_capability(Mat(0, 2), U), ContractError);
    CHECK_THROWS_AS(max_min_capability(Mat::Identity(2, 2), Polytope::whole_space(2)), ContractError);
}

TEST_CASE("capability request vector") {
    CapabilityStack s;
    s.B = Mat(1, 2);
    s.B << 2, 0;
    s.q = Vec::Constant(1, -10);
    s.D = Mat::Zero(1, 2);
    s.A = Mat::Zero(1, 0);
    s.obstacle_ids = {0};
    const CapabilityResult r = capability_request_vector(s, Polytope::linf_ball(2, 20.0), Vec2::Zero());
    CHECK(r.u_star(0) == doctest::Approx(20));
    CHECK(r.c_bar(0) == doctest::Approx(30));

    CapabilityStack z = s;
    z.B = Mat::Zero(1, 2);
    z.q = Vec::Zero(1);
    const CapabilityResult rz = capability_request_vector(z, Polytope::linf_ball(2, 20.0), Vec2::Zero());
    CHECK(rz.gamma_star == doctest::Approx(0));
    CHECK(rz.c_bar(0) == doctest::Approx(0));
}

}
