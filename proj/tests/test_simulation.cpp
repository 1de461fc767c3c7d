#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "colsafe/errors.hpp"
#include "colsafe/simulation.hpp"
#include "colsafe/trace_io.hpp"

using namespace colsafe;

namespace {
const char* kPair = R"({"name": "pair", "duration": 1.0,
  "agents": [{"p": [0, 0]}, {"p": [3, 0]}], "edges": [[0, 1]], "drive": [1, 0]})";

std::string first_line(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    return line;
}
std::size_t line_count(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);) ++n;
    return n;
}
}  // namespace

TEST_SUITE("simulation") {

TEST_CASE("scenario defaults and errors") {
    const Scenario s = parse_scenario(kPair);
    CHECK(s.dt == 0.01);
    CHECK(s.agents[0].mass == 0.5);
    CHECK(s.u_max == 20.0);
    CHECK_THROWS_AS(parse_scenario("{}"), ConfigError);
    CHECK_THROWS_AS(parse_scenario(R"({"agents": [{"p": [0]}]})"), ConfigError);
    CHECK_THROWS_AS(parse_scenario("not json"), ConfigError);
}

TEST_CASE("presets") {
    const Scenario t = preset("tree7");
    CHECK(t.agents.size() == 7);
    CHECK(t.dt == 0.01);
    for (const auto& e : t.edges) {
        CHECK(e.k == 3.0);
        CHECK(e.R == 3.0);
        CHECK(e.b == 1.0);
    }
    CHECK(preset("clique8").edges.size() == 28);
    CHECK_THROWS_AS(preset("nope"), ConfigError);
}

TEST_CASE("obstacle-free run never filters") {
    const Scenario s = parse_scenario(kPair);
    const TraceLog log = run(s);
    for (const auto& st : log.steps)
        for (const auto& a : st.agents) CHECK(a.u_s.norm() == 0.0);
    const Summary sum = summarize(log, s);
    CHECK(std::isinf(sum.min_h));
    CHECK(sum.max_tau == 1);
}

TEST_CASE("trace files") {
    const auto dir = std::filesystem::temp_directory_path() / "colsafe-unit-traces";
    std::filesystem::remove_all(dir);
    Scenario s = parse_scenario(kPair);
    s.duration = 0;
    emit_traces(run(s), s, dir.string());
    CHECK(first_line(dir / "trajectory.csv") == "t,agent,px,py,vx,vy,ufx,ufy,usx,usy");
    CHECK(first_line(dir / "barrier.csv") == "t,agent,obstacle,h,phi1");
    CHECK(first_line(dir / "rounds.csv") == "t,tau,status");
    CHECK(line_count(dir / "trajectory.csv") == 1);
    CHECK(line_count(dir / "rounds.csv") == 1);
    CHECK(emit_plots(TraceLog{}, s, dir.string()).empty());

    const Scenario p = parse_scenario(kPair);
    emit_traces(run(p), p, dir.string());
    const LoadedTrace back = read_traces(dir.string());
    CHECK(back.log.steps.size() == 100);
    std::filesystem::remove_all(dir);
}

TEST_CASE("tree preset stays safe within the round bound") {
    const Scenario s = preset("tree7");
    const Summary sum = summarize(run(s), s);
    CHECK(sum.min_h >= 0.0);
    CHECK(sum.max_tau <= 2);
    CHECK(sum.theorem2_pass);
}

}
