#include <doctest.h>

#include "colsafe/negotiation.hpp"

using namespace colsafe;

namespace {
AgentProblem quiet(AgentId id, std::vector<AgentId> nbrs, double q) {
    AgentProblem a;
    a.id = id;
    a.neighbors = std::move(nbrs);
    a.U = Polytope::linf_ball(2, 20.0);
    a.B = Mat::Identity(1, 2);
    a.q = Vec::Constant(1, q);
    for (AgentId j : a.neighbors) a.A_blocks[j] = Mat::Zero(1, 2);
    return a;
}
Mat row(double x, double y) {
    Mat A(1, 2);
    A << x, y;
    return A;
}
}  // namespace

TEST_SUITE("negotiation") {

TEST_CASE("capable agent sends nothing") {
    const AgentProblem a = quiet(0, {1, 2}, 5.0);
    NegotiationLedger L = init_ledger(a);
    L.c_bar = a.B * Vec2(20, 20) + a.q;
    CHECK(make_requests(a, L).empty());
}

TEST_CASE("deficit split") {
    const Vec d = Vec::Constant(1, -6.0);
    const auto s = split_deficit(d, {1, 2, 3}, {});
    for (AgentId j : {1, 2, 3}) CHECK(s.at(j)(0) == doctest::Approx(-2));
    const auto c = split_deficit(d, {1, 2, 3}, {2});
    CHECK(c.at(1)(0) == doctest::Approx(-3));
    CHECK(c.at(2)(0) == 0.0);
    CHECK(c.at(3)(0) == doctest::Approx(-3));
}

TEST_CASE("single feasible request keeps the intersection") {
    AgentProblem a = quiet(0, {1}, 0.0);
    a.B = Mat(0, 2);
    a.q = Vec(0);
    NegotiationLedger L = init_ledger(a);
    const CoordinateResult cr = coordinate(a, L, {{1, Vec::Constant(1, -1.0), row(1, 0)}});
    CHECK_FALSE(cr.pinned);
    REQUIRE(cr.adjustments.size() == 1);
    CHECK(cr.adjustments[0].epsilon(0) == 0.0);
    CHECK_FALSE(contains(L.U_bar, Vec2(0.5, 0)));
    CHECK(contains(L.U_bar, Vec2(1.5, 0)));
}

TEST_CASE("adjustment on a pinned singleton") {
    AgentProblem a = quiet(0, {1}, 0.0);
    a.B = Mat(0, 2);
    a.q = Vec(0);
    a.U = Polytope::box(Vec2(5, 0), Vec2(5, 0));
    NegotiationLedger L = init_ledger(a);
    L.c_bar_in[1] = Vec::Constant(1, -10.0);
    const CoordinateResult cr = coordinate(a, L, {{1, Vec::Zero(1), row(1, 0)}});
    CHECK(cr.pinned);
    REQUIRE(cr.adjustments.size() == 1);
    CHECK(cr.adjustments[0].epsilon(0) == doctest::Approx(5));
    CHECK(L.c_bar_in.at(1)(0) == doctest::Approx(-5));
}

TEST_CASE("compromise actions") {
    const Polytope U = Polytope::linf_ball(2, 1.0);
    SUBCASE("single request goes to the best vertex") {
        const ClosestPointChoice c =
            get_closest_point(U, std::nullopt, {{1, Polytope::at_least(Vec2(1, 2), 5.0), Vec::Constant(1, -1), Vec::Zero(1)}});
        CHECK(c.branch == 1);
        CHECK((c.u_bar - Vec2(1, 1)).norm() < 1e-6);
    }
    SUBCASE("jointly infeasible pair on a box goes to the boundary near the lens") {
        const ClosestPointChoice c = get_closest_point(
            U, std::nullopt,
            {{1, Polytope::at_least(Vec2(1, 1), 2.5), Vec::Constant(1, -1), Vec::Zero(1)},
             {2, Polytope::at_least(Vec2(-1, 1), 1.5), Vec::Constant(1, -1), Vec::Zero(1)}});
        CHECK(c.branch == 1);
        // the lens has its tip at (0.5, 2); the nearest box point is (0.5, 1)
        CHECK((c.u_bar - Vec2(0.5, 1)).norm() < 1e-6);
    }
    SUBCASE("branch three keeps a boundary action already in the region") {
        const Vec prev = Vec2(1, 0.2);
        const ClosestPointChoice c =
            get_closest_point(U, prev, {{1, Polytope::at_least(Vec2(1, 0), 0.5), Vec::Constant(1, -1), Vec::Constant(1, -1)}});
        CHECK(c.branch == 3);
        CHECK((c.u_bar - prev).norm() < 1e-6);
    }
}

TEST_CASE("quiescent network converges in one round") {
    NetworkSnapshot net;
    net.agents = {quiet(0, {1}, 1.0), quiet(1, {0}, 1.0)};
    int messages = 0;
    const ProtocolOutcome out = run_synchronous_engine(net, {}, [&](const MessageRecord&) { ++messages; });
    CHECK(out.status == ProtocolStatus::Converged);
    CHECK(out.tau_final == 1);
    CHECK(messages == 0);
    for (const auto& U : out.U_bar) CHECK(contains(U, Vec2(20, 20)));
}

TEST_CASE("engine rejects malformed snapshots") {
    NetworkSnapshot net;
    net.agents = {quiet(1, {0}, 1.0), quiet(0, {1}, 1.0)};
    CHECK_THROWS(run_synchronous_engine(net));
}

}
