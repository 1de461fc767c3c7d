#include "colsafe/trace_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "colsafe/errors.hpp"

namespace colsafe {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    return out;
}

ProtocolStatus parse_status(const std::string& s) {
    if (s == "converged") return ProtocolStatus::Converged;
    if (s == "terminally_infeasible") return ProtocolStatus::TerminallyInfeasible;
    if (s == "round_cap_exceeded") return ProtocolStatus::RoundCapExceeded;
    throw ConfigError("rounds.csv: unknown status '" + s + "'");
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p, const std::string& header) {
    std::ifstream in(p);
    if (!in) throw ConfigError("trace: missing " + p.string());
    std::string line;
    if (!std::getline(in, line) || line != header) throw ConfigError("trace: unexpected header in " + p.string());
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cells.push_back(c);
        rows.push_back(std::move(cells));
    }
    return rows;
}

}  // namespace

std::string message_to_json_line(const MessageLine& m) {
    nlohmann::ordered_json j;
    j["t"] = std::stod(num(m.t));
    j["tau"] = m.msg.tau;
    j["upsilon"] = m.msg.upsilon;
    j["from"] = m.msg.from;
    j["to"] = m.msg.to;
    j["kind"] = m.msg.kind == MessageKind::Request ? "request" : "adjustment";
    std::vector<double> payload(m.msg.payload.data(), m.msg.payload.data() + m.msg.payload.size());
    j["payload"] = payload;
    return j.dump();
}

void emit_traces(const TraceLog& log, const Scenario& scenario, const std::string& out_dir) {
    const fs::path dir(out_dir);
    fs::create_directories(dir);

    auto traj = open_out(dir / "trajectory.csv");
    traj << "t,agent,px,py,vx,vy,ufx,ufy,usx,usy\n";
    auto bar = open_out(dir / "barrier.csv");
    bar << "t,agent,obstacle,h,phi1\n";
    auto rounds = open_out(dir / "rounds.csv");
    rounds << "t,tau,status\n";
    for (const auto& st : log.steps) {
        const std::string t = num(st.t);
        for (const auto& a : st.agents)
            traj << t << ',' << a.agent << ',' << num(a.x.p.x()) << ',' << num(a.x.p.y()) << ',' << num(a.x.v.x())
                 << ',' << num(a.x.v.y()) << ',' << num(a.u_f.x()) << ',' << num(a.u_f.y()) << ','
                 << num(a.u_s.x()) << ',' << num(a.u_s.y()) << '\n';
        for (const auto& b : st.barriers)
            bar << t << ',' << b.agent << ',' << b.obstacle << ',' << num(b.h) << ',' << num(b.phi1) << '\n';
        rounds << t << ',' << st.tau << ',' << to_string(st.status) << '\n';
    }

    auto msgs = open_out(dir / "messages.ndjson");
    for (const auto& m : log.messages) msgs << message_to_json_line(m) << '\n';

    auto diag = open_out(dir / "diagnostics.txt");
    for (const auto& d : log.diagnostics) diag << d << '\n';

    open_out(dir / "scenario.json") << scenario_to_json(scenario);
    open_out(dir / "summary.json") << summary_to_json(summarize(log, scenario));
}

LoadedTrace read_traces(const std::string& dir_str) {
    const fs::path dir(dir_str);
    LoadedTrace out;
    out.scenario = load_scenario((dir / "scenario.json").string());

    std::map<std::string, std::size_t> index;  // time string -> step
    auto step_at = [&](const std::string& t) -> StepRecord& {
        auto it = index.find(t);
        if (it == index.end()) {
            it = index.emplace(t, out.log.steps.size()).first;
            out.log.steps.emplace_back();
            out.log.steps.back().t = std::stod(t);
        }
        return out.log.steps[it->second];
    };
    try {
        for (const auto& r : read_csv(dir / "rounds.csv", "t,tau,status")) {
            if (r.size() != 3) throw ConfigError("rounds.csv: bad row");
            StepRecord& s = step_at(r[0]);
            s.tau = std::stoi(r[1]);
            s.status = parse_status(r[2]);
        }
        for (const auto& r : read_csv(dir / "trajectory.csv", "t,agent,px,py,vx,vy,ufx,ufy,usx,usy")) {
            if (r.size() != 10) throw ConfigError("trajectory.csv: bad row");
            AgentRecord a;
            a.agent = std::stoi(r[1]);
            a.x.p = Vec2(std::stod(r[2]), std::stod(r[3]));
            a.x.v = Vec2(std::stod(r[4]), std::stod(r[5]));
            a.u_f = Vec2(std::stod(r[6]), std::stod(r[7]));
            a.u_s = Vec2(std::stod(r[8]), std::stod(r[9]));
            step_at(r[0]).agents.push_back(a);
        }
        for (const auto& r : read_csv(dir / "barrier.csv", "t,agent,obstacle,h,phi1")) {
            if (r.size() != 5) throw ConfigError("barrier.csv: bad row");
            step_at(r[0]).barriers.push_back({std::stoi(r[1]), std::stoi(r[2]), std::stod(r[3]), std::stod(r[4])});
        }
    } catch (const std::logic_error& e) {
        if (dynamic_cast<const ContractError*>(&e)) throw;
        throw ConfigError(std::string("trace: malformed number: ") + e.what());
    }
    std::stable_sort(out.log.steps.begin(), out.log.steps.end(),
                     [](const StepRecord& a, const StepRecord& b) { return a.t < b.t; });
    return out;
}

namespace {

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

struct Frame {
    double x0, x1, y0, y1;  // data range
    double left, top, width, height;  // pixel box
    double px(double x) const { return left + (x - x0) / (x1 - x0) * width; }
    double py(double y) const { return top + height - (y - y0) / (y1 - y0) * height; }
};

Frame frame(double x0, double x1, double y0, double y1, double left, double top, double w, double h) {
    if (x1 - x0 < 1e-9) { x0 -= 1; x1 += 1; }
    if (y1 - y0 < 1e-9) { y0 -= 1; y1 += 1; }
    return {x0, x1, y0, y1, left, top, w, h};
}

void axes(std::ostream& o, const Frame& f, const std::string& title, const std::string& xl, const std::string& yl) {
    o << "<rect x='" << f.left << "' y='" << f.top << "' width='" << f.width << "' height='" << f.height
      << "' fill='none' stroke='#333'/>\n";
    o << "<text x='" << f.left + f.width / 2 << "' y='" << f.top - 8 << "' text-anchor='middle' font-size='13'>" << title
      << "</text>\n";
    o << "<text x='" << f.left + f.width / 2 << "' y='" << f.top + f.height + 32
      << "' text-anchor='middle' font-size='11'>" << xl << "</text>\n";
    o << "<text x='" << f.left - 40 << "' y='" << f.top + f.height / 2 << "' font-size='11' transform='rotate(-90 "
      << f.left - 40 << ' ' << f.top + f.height / 2 << ")' text-anchor='middle'>" << yl << "</text>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = f.x0 + (f.x1 - f.x0) * k / 4, yv = f.y0 + (f.y1 - f.y0) * k / 4;
        char bx[32], by[32];
        std::snprintf(bx, sizeof bx, "%.3g", xv);
        std::snprintf(by, sizeof by, "%.3g", yv);
        o << "<text x='" << f.px(xv) << "' y='" << f.top + f.height + 14 << "' font-size='10' text-anchor='middle'>"
          << bx << "</text>\n";
        o << "<text x='" << f.left - 4 << "' y='" << f.py(yv) + 3 << "' font-size='10' text-anchor='end'>" << by
          << "</text>\n";
    }
}

void polyline(std::ostream& o, const Frame& f, const std::vector<std::pair<double, double>>& pts, const char* color,
              bool steps = false) {
    o << "<polyline fill='none' stroke='" << color << "' stroke-width='1.2' points='";
    for (std::size_t k = 0; k < pts.size(); ++k) {
        if (steps && k > 0) o << num(f.px(pts[k].first)) << ',' << num(f.py(pts[k - 1].second)) << ' ';
        o << num(f.px(pts[k].first)) << ',' << num(f.py(pts[k].second)) << ' ';
    }
    o << "'/>\n";
}

}  // namespace

std::vector<std::string> emit_plots(const TraceLog& log, const Scenario& scenario, const std::string& out_dir) {
    std::vector<std::string> written;
    if (log.steps.empty()) {
        std::fprintf(stderr, "warning: empty trace, no plots written\n");
        return written;
    }
    const fs::path dir(out_dir);
    fs::create_directories(dir);
    const std::size_t n = scenario.agents.size();

    // trajectories
    {
        double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
        auto grow = [&](double x, double y, double pad) {
            x0 = std::min(x0, x - pad); x1 = std::max(x1, x + pad);
            y0 = std::min(y0, y - pad); y1 = std::max(y1, y + pad);
        };
        for (const auto& st : log.steps)
            for (const auto& a : st.agents) grow(a.x.p.x(), a.x.p.y(), 0.5);
        for (const auto& o : scenario.obstacles) {
            grow(o.p.x(), o.p.y(), o.r);
            const Vec2 end = o.p + o.v * log.steps.back().t;
            grow(end.x(), end.y(), o.r);
        }
        // equal aspect
        const double span = std::max(x1 - x0, y1 - y0);
        const double cx = (x0 + x1) / 2, cy = (y0 + y1) / 2;
        const Frame f = frame(cx - span / 2, cx + span / 2, cy - span / 2, cy + span / 2, 60, 40, 560, 560);
        const fs::path p = dir / "trajectory.svg";
        auto o = open_out(p);
        o << "<svg xmlns='http://www.w3.org/2000/svg' width='660' height='660' font-family='sans-serif'>\n";
        o << "<rect width='100%' height='100%' fill='white'/>\n";
        axes(o, f, scenario.name + ": trajectories", "x [m]", "y [m]");
        const double scale = f.width / (f.x1 - f.x0);
        for (const auto& ob : scenario.obstacles) {
            o << "<circle cx='" << num(f.px(ob.p.x())) << "' cy='" << num(f.py(ob.p.y())) << "' r='"
              << num(ob.r * scale) << "' fill='#999' fill-opacity='0.5' stroke='#444'/>\n";
            if (ob.v.norm() > 0) {
                const Vec2 end = ob.p + ob.v * log.steps.back().t;
                o << "<circle cx='" << num(f.px(end.x())) << "' cy='" << num(f.py(end.y())) << "' r='"
                  << num(ob.r * scale) << "' fill='none' stroke='#444' stroke-dasharray='4 3'/>\n";
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<std::pair<double, double>> pts;
            for (const auto& st : log.steps)
                for (const auto& a : st.agents)
                    if (static_cast<std::size_t>(a.agent) == i) pts.push_back({a.x.p.x(), a.x.p.y()});
            if (pts.empty()) continue;
            const char* c = kPalette[i % 10];
            polyline(o, f, pts, c);
            o << "<circle cx='" << num(f.px(pts.front().first)) << "' cy='" << num(f.py(pts.front().second))
              << "' r='4' fill='" << c << "'/>\n";
            o << "<rect x='" << num(f.px(pts.back().first) - 4) << "' y='" << num(f.py(pts.back().second) - 4)
              << "' width='8' height='8' fill='none' stroke='" << c << "'/>\n";
        }
        o << "</svg>\n";
        written.push_back(p.string());
    }

    // safety controls and rounds
    {
        const double t0 = log.steps.front().t, t1 = log.steps.back().t;
        double umin = 0, umax = 0;
        int taumax = 1;
        for (const auto& st : log.steps) {
            taumax = std::max(taumax, st.tau);
            for (const auto& a : st.agents) {
                umin = std::min({umin, a.u_s.x(), a.u_s.y()});
                umax = std::max({umax, a.u_s.x(), a.u_s.y()});
            }
        }
        const fs::path p = dir / "controls.svg";
        auto o = open_out(p);
        o << "<svg xmlns='http://www.w3.org/2000/svg' width='760' height='720' font-family='sans-serif'>\n";
        o << "<rect width='100%' height='100%' fill='white'/>\n";
        const Frame fx = frame(t0, t1, umin, umax, 70, 30, 660, 170);
        const Frame fy = frame(t0, t1, umin, umax, 70, 260, 660, 170);
        const Frame ft = frame(t0, t1, 0, taumax + 0.5, 70, 490, 660, 170);
        axes(o, fx, "safety control u_s (x)", "t [s]", "m/s^2");
        axes(o, fy, "safety control u_s (y)", "t [s]", "m/s^2");
        axes(o, ft, "collaborative rounds per step", "t [s]", "tau");
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<std::pair<double, double>> px, py;
            for (const auto& st : log.steps)
                for (const auto& a : st.agents)
                    if (static_cast<std::size_t>(a.agent) == i) {
                        px.push_back({st.t, a.u_s.x()});
                        py.push_back({st.t, a.u_s.y()});
                    }
            polyline(o, fx, px, kPalette[i % 10]);
            polyline(o, fy, py, kPalette[i % 10]);
        }
        std::vector<std::pair<double, double>> pt;
        for (const auto& st : log.steps) pt.push_back({st.t, static_cast<double>(st.tau)});
        polyline(o, ft, pt, "#000", true);
        o << "</svg>\n";
        written.push_back(p.string());
    }
    return written;
}

}  // namespace colsafe
