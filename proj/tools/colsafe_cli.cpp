#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "colsafe/errors.hpp"
#include "colsafe/simulation.hpp"
#include "colsafe/trace_io.hpp"
#include "colsafe/verify.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kSolverFailure = 3;
constexpr int kSafetyViolation = 4;
constexpr double kSafetyTol = 1e-4;

void print_summary(const colsafe::Summary& s) {
    std::printf("steps: %zu\n", s.steps);
    std::printf("min_h: %s\n", std::isinf(s.min_h) ? "inf" : std::to_string(s.min_h).c_str());
    std::printf("max_tau: %d  mean_tau: %.3f\n", s.max_tau, s.mean_tau);
    std::printf("terminally_infeasible_steps: %d  round_cap_exceeded_steps: %d\n", s.terminally_infeasible_steps,
                s.round_cap_steps);
    for (std::size_t i = 0; i < s.max_us_norm.size(); ++i)
        std::printf("agent %zu max |u_s|: %.4f\n", i, s.max_us_norm[i]);
    if (s.tree) std::printf("theorem2_bound (max tau <= %zu): %s\n", s.max_degree, s.theorem2_pass ? "PASS" : "FAIL");
}

colsafe::Scenario resolve(const std::string& scenario, const std::string& preset_name) {
    if (!preset_name.empty()) return colsafe::preset(preset_name);
    if (scenario.empty()) throw colsafe::ConfigError("run: give a scenario file or --preset");
    if (!std::filesystem::exists(scenario)) {
        for (const auto& p : colsafe::preset_names())
            if (p == scenario) return colsafe::preset(p);
    }
    return colsafe::load_scenario(scenario);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"colsafe: collaborative safety for mass-spring formations"};
    app.require_subcommand(1);

    std::string scenario, preset_name, out_dir = "trace";
    auto* run = app.add_subcommand("run", "simulate a scenario file or preset");
    run->add_option("scenario", scenario, "scenario JSON file or preset name");
    run->add_option("--out", out_dir, "output directory")->capture_default_str();
    run->add_option("--preset", preset_name, "built-in scenario")
        ->check(CLI::IsMember({"tree7", "clique8", "clique8-dynamic", "clique8-fast"}));

    std::string trace_dir;
    auto* plot = app.add_subcommand("plot", "render SVG figures from a trace directory");
    plot->add_option("trace-dir", trace_dir)->required();
    auto* report = app.add_subcommand("report", "summarize a trace directory");
    report->add_option("trace-dir", trace_dir)->required();
    auto* verify = app.add_subcommand("verify", "run the oracle and property suites");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (*run) {
            const colsafe::Scenario s = resolve(scenario, preset_name);
            const colsafe::TraceLog log = colsafe::run(s);
            colsafe::emit_traces(log, s, out_dir);
            const colsafe::Summary sum = colsafe::summarize(log, s);
            print_summary(sum);
            std::printf("traces written to %s\n", out_dir.c_str());
            if (sum.min_h < -kSafetyTol) {
                std::fprintf(stderr, "safety violation: min h = %g\n", sum.min_h);
                return kSafetyViolation;
            }
            return kOk;
        }
        if (*plot) {
            const colsafe::LoadedTrace t = colsafe::read_traces(trace_dir);
            for (const auto& f : colsafe::emit_plots(t.log, t.scenario, trace_dir)) std::printf("%s\n", f.c_str());
            return kOk;
        }
        if (*report) {
            const colsafe::LoadedTrace t = colsafe::read_traces(trace_dir);
            const colsafe::Summary sum = colsafe::summarize(t.log, t.scenario);
            print_summary(sum);
            return sum.min_h < -kSafetyTol ? kSafetyViolation : kOk;
        }
        if (*verify) {
            const auto results = colsafe::verify::run_all(std::cout);
            for (const auto& r : results)
                if (!r.passed) return kSafetyViolation;
            return kOk;
        }
    } catch (const colsafe::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfigError;
    } catch (const colsafe::SolverError& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return kSolverFailure;
    } catch (const colsafe::ContractError& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return kSolverFailure;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kConfigError;
    }
    return kOk;
}
