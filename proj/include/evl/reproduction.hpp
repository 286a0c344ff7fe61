#pragma once

#include <ctime>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "evl/checks.hpp"

namespace evl {

struct Report {
    json doc;
    std::vector<CheckResult> checks;
    std::vector<CsvTable> tables;

    bool all_passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return !checks.empty();
    }
};

inline std::string utc_timestamp() {
    std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

/// Everything except the "timestamp" member, which holds the wall-clock data.
inline json deterministic_part(const json& report) {
    json j = report;
    j.erase("timestamp");
    return j;
}

/// Runs every acceptance computation in order and assembles one report. Two runs with the
/// same config must agree outside "timestamp".
inline Report run_reproduction(const RunConfig& cfg) {
    cfg.validate();
    Report rep;
    json timing = json::object();
    auto run = [&](const char* key, double limit, auto fn) {
        CheckResult r = timed(limit, fn);
        timing[key] = r.seconds;
        rep.doc[key] = r.detail;
        for (auto& t : r.tables) rep.tables.push_back(t);
        rep.checks.push_back(std::move(r));
    };
    rep.doc["config"] = to_json(cfg);

    run("theta_ex1", 1, [&] { return check_theta_exact(cfg); });
    run("xi_bounds", 1, [&] { return check_xi_bounds(cfg); });
    {
        const auto t0 = std::chrono::steady_clock::now();
        CsvTable csv;
        rep.doc["theta_seq_ex1"] = theta_sequence_ex1(cfg, csv);
        rep.tables.push_back(std::move(csv));
        timing["theta_seq_ex1"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    run("theta_seq_ex2", 5, [&] { return check_ex2_limit(cfg); });
    run("survivor_oracle", 60, [&] { return check_survivor_oracle(cfg); });
    run("window_oracle", 60, [&] { return check_window_oracle(cfg); });
    run("hypotheses", 5, [&] { return check_hypothesis_sequences(cfg); });
    run("dprime", 300, [&] { return check_dprime(cfg); });
    run("bv_bounds", 0, [&] { return check_bv_bounds(cfg); });
    run("monte_carlo", 600, [&] { return check_monte_carlo(cfg); });
    {
        const auto t0 = std::chrono::steady_clock::now();
        rep.doc["runs_estimate"] = runs_diagnostic(cfg);
        timing["runs_estimate"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }

    rep.doc["theta_ex1_decimal"] = rep.doc["theta_ex1"]["rounded_15"];
    rep.doc["theta_limit_ex2"] = 1;
    json crit = json::array();
    for (const auto& c : rep.checks)
        crit.push_back({{"id", c.id}, {"title", c.title}, {"passed", c.passed}, {"summary", c.summary}});
    rep.doc["criteria"] = crit;
    rep.doc["timestamp"] = {{"utc", utc_timestamp()}, {"seconds", timing}};
    return rep;
}

inline void write_tables(const std::vector<CsvTable>& tables, const std::string& dir) {
    if (dir.empty()) return;
    std::filesystem::create_directories(dir);
    for (const auto& t : tables) {
        std::ofstream out(std::filesystem::path(dir) / (t.name + ".csv"));
        if (!out) throw BadConfig("cannot write " + t.name + ".csv in " + dir);
        out << t.header << "\n";
        for (const auto& row : t.rows) out << row << "\n";
    }
}

} // namespace evl
