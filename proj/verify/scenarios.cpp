#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "colsafe/trace_io.hpp"
#include "colsafe/verify.hpp"

namespace colsafe::verify {

namespace {

constexpr double kSafetyTol = 1e-4;

struct CachedRun {
    Scenario scenario;
    TraceLog log;
    Summary summary;
    double seconds = 0;
};

const CachedRun& cached(const std::string& name) {
    static std::map<std::string, CachedRun> runs;
    auto it = runs.find(name);
    if (it != runs.end()) return it->second;
    CachedRun c;
    c.scenario = preset(name);
    const auto t0 = std::chrono::steady_clock::now();
    c.log = run(c.scenario);
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.summary = summarize(c.log, c.scenario);
    return runs.emplace(name, std::move(c)).first->second;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool same_tree(const std::filesystem::path& a, const std::filesystem::path& b, std::string& why) {
    std::size_t files = 0;
    for (const auto& e : std::filesystem::directory_iterator(a)) {
        ++files;
        const auto other = b / e.path().filename();
        if (!std::filesystem::exists(other) || slurp(e.path()) != slurp(other)) {
            why = e.path().filename().string() + " differs";
            return false;
        }
    }
    std::size_t files_b = 0;
    for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(b)) ++files_b;
    if (files != files_b) {
        why = "file sets differ";
        return false;
    }
    return true;
}

std::string min_h_str(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

}  // namespace

CheckResult tree_scenario() {
    CheckResult r{1, "tree7 scenario", true, ""};
    const CachedRun& c = cached("tree7");
    const Scenario& s = c.scenario;
    bool params = s.dt == 0.01 && s.duration >= 20.0 && s.u_max == 20.0 && s.agents.size() == 7 && s.edges.size() == 6;
    for (const auto& a : s.agents) params = params && a.mass == 0.5;
    for (const auto& e : s.edges) params = params && e.k == 3.0 && e.R == 3.0 && e.b == 1.0;
    const Summary& m = c.summary;
    r.passed = params && m.min_h >= -kSafetyTol && m.max_tau <= 2 && m.theorem2_pass && m.tree;
    char buf[256];
    std::snprintf(buf, sizeof buf, "parameters %s, min_h %s, max tau %d, tree bound %s, %.2f s wall", params ? "ok" : "WRONG",
                  min_h_str(m.min_h).c_str(), m.max_tau, m.theorem2_pass ? "held" : "broken", c.seconds);
    r.detail = buf;
    return r;
}

CheckResult clique_scenario() {
    CheckResult r{2, "clique8 scenario", true, ""};
    const CachedRun& c = cached("clique8");
    const Summary& m = c.summary;
    r.passed = m.min_h >= -kSafetyTol && m.max_tau <= 20;
    char buf[256];
    std::snprintf(buf, sizeof buf, "min_h %s, max tau %d (<= 13: %s), mean tau %.2f, round-cap steps %d/%zu, %.2f s wall",
                  min_h_str(m.min_h).c_str(), m.max_tau, m.max_tau <= 13 ? "yes" : "no", m.mean_tau, m.round_cap_steps,
                  m.steps, c.seconds);
    r.detail = buf;
    return r;
}

CheckResult determinism() {
    CheckResult r{8, "byte-identical traces", true, ""};
    const auto root = std::filesystem::temp_directory_path() /
                      ("colsafe-verify-" + std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
    std::string detail;
    for (const std::string name : {"tree7", "clique8"}) {
        const CachedRun& c = cached(name);
        const auto a = root / (name + "-a");
        const auto b = root / (name + "-b");
        emit_traces(c.log, c.scenario, a.string());
        const Scenario s = preset(name);
        emit_traces(run(s), s, b.string());
        std::string why;
        if (!same_tree(a, b, why)) {
            r.passed = false;
            detail += name + ": " + why + "; ";
        } else {
            detail += name + ": identical; ";
        }
    }
    std::error_code ec;
    std::filesystem::remove_all(root, ec);
    r.detail = detail.substr(0, detail.size() - 2);
    return r;
}

CheckResult dynamic_obstacles() {
    CheckResult r{9, "moving obstacles", true, ""};
    const CachedRun& slow = cached("clique8-dynamic");
    const CachedRun& fast = cached("clique8-fast");
    bool flagged = false;
    for (const auto& d : fast.log.diagnostics) flagged = flagged || d.find("negative h") != std::string::npos;
    r.passed = slow.summary.min_h >= -kSafetyTol && flagged;
    r.detail = "receding obstacles min_h " + min_h_str(slow.summary.min_h) + "; fast head-on obstacles min_h " +
               min_h_str(fast.summary.min_h) + (flagged ? ", violation reported" : ", violation NOT reported");
    return r;
}

std::vector<CheckResult> run_all(std::ostream& os) {
    using Check = CheckResult (*)();
    const Check checks[] = {tree_scenario,        clique_scenario,       max_min_equivalence,
                            closest_point_oracle, lie_chain_consistency, protocol_algebra,
                            terminal_infeasibility, determinism,         dynamic_obstacles};
    std::vector<CheckResult> results;
    for (Check f : checks) {
        CheckResult c;
        try {
            c = f();
        } catch (const std::exception& e) {
            c.id = static_cast<int>(results.size()) + 1;
            c.name = "criterion";
            c.passed = false;
            c.detail = std::string("threw: ") + e.what();
        }
        os << (c.passed ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << ": " << c.detail << std::endl;
        results.push_back(std::move(c));
    }
    return results;
}

}  // namespace colsafe::verify
