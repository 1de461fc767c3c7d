#include <doctest.h>

#include "colsafe/errors.hpp"
#include "colsafe/formation.hpp"

using namespace colsafe;

namespace {
AgentState at(double px, double py) {
    AgentState x;
    x.p = Vec2(px, py);
    return x;
}
}  // namespace

TEST_SUITE("formation") {

TEST_CASE("spring law") {
    const FormationGraph g({0.5, 0.5}, {{0, 1, 3, 3, 1}});
    CHECK(formation_control(0, {at(0, 0), at(3, 0)}, g).norm() == doctest::Approx(0));
    const Vec2 a = formation_control(0, {at(0, 0), at(4, 0)}, g);
    CHECK(a(0) == doctest::Approx(6));
    CHECK(a(1) == doctest::Approx(0));
    CHECK_THROWS(formation_control(0, {at(1, 1), at(1, 1)}, g));
}

TEST_CASE("graph structure") {
    const FormationGraph tree({1, 1, 1, 1}, {{0, 1}, {0, 2}, {1, 3}});
    CHECK(tree.is_tree());
    CHECK(tree.max_degree() == 2);
    const FormationGraph loop({1, 1, 1}, {{0, 1}, {1, 2}, {2, 0}});
    CHECK_FALSE(loop.is_tree());
}

TEST_CASE("filter without barriers leaves the formation law alone") {
    const Polytope U = Polytope::linf_ball(2, 20.0);
    const FilterResult r = safety_filter({}, U, U, ClassKGains{});
    CHECK(r.u_s.norm() == 0.0);
    CHECK(r.dropped.empty());
}

TEST_CASE("filter lands on the barrier hyperplane") {
    const ClassKGains g;
    AgentState x = at(1.5, 0);
    x.v = Vec2(-2, 0);
    const Obstacle o{0, Vec2::Zero(), Vec2::Zero(), 1.0};
    const CbfRow row = cbf_row(x, Vec2::Zero(), o, g);
    REQUIRE(row.Lf_phi1 + g.alpha1 * row.phi1 < 0);  // u_s = 0 would be unsafe
    const Polytope U = Polytope::linf_ball(2, 20.0);
    const FilterResult r = safety_filter({row}, U, U, g);
    CHECK((row.Lg_phi1 * r.u_s)(0) == doctest::Approx(row.Lf_phi1 + g.alpha1 * row.phi1));
    // minimum norm: u_s is parallel to the row normal
    CHECK(std::abs(row.Lg_phi1(1) * r.u_s(0) - row.Lg_phi1(0) * r.u_s(1)) < 1e-9);
}

TEST_CASE("velocity windows") {
    Polytope v = Polytope::whole_space(1);
    v.add_halfspace(Vec::Constant(1, 1.0), 1.0);
    const Polytope a = velocity_to_accel(v, 0.01);
    CHECK(a.l(0) == doctest::Approx(100));
    CHECK(velocity_to_accel(v, 1.0).l(0) == doctest::Approx(1));
    CHECK_THROWS_AS(velocity_to_accel(v, 0.0), ContractError);
}

TEST_CASE("resting network is a fixed point") {
    const FormationModel model{FormationGraph({0.5, 0.5}, {{0, 1, 3, 3, 1}}), {}};
    const std::vector<AgentState> x{at(0, 0), at(3, 0)};
    const auto y = step(x, {Vec2::Zero(), Vec2::Zero()}, 0.01, model);
    for (std::size_t i = 0; i < x.size(); ++i) {
        CHECK((y[i].p - x[i].p).norm() == 0.0);
        CHECK(y[i].v.norm() == 0.0);
    }
}

}
