// One PASS/FAIL line per acceptance criterion. Run without arguments for all of them, or with
// --criterion N for one (exit status 0 on PASS).

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "evl/evl.hpp"

using namespace evl;

namespace {

struct Line {
    int id;
    bool passed;
    std::string text;
};

// wall-clock budgets in seconds, 0 = none
double budget(int id) {
    switch (id) {
    case 1: return 1;
    case 2: return 1;
    case 3: return 5;
    case 4: return 60;
    case 6: return 5;
    case 7: return 300;
    case 9: return 600;
    default: return 0;
    }
}

Line from_check(const CheckResult& r) {
    const double limit = budget(r.id);
    const bool in_time = limit == 0 || r.seconds < limit;
    std::ostringstream s;
    s << r.title << ": " << r.summary << " [" << detail::fmt(r.seconds, "%.2f") << " s";
    if (limit > 0) s << " of " << limit << " s";
    s << "]";
    if (!in_time) s << " over budget";
    return {r.id, r.passed && in_time, s.str()};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Two full `reproduce` runs through the CLI; the JSON files must match byte for byte once the
// timestamp member is removed.
Line determinism() {
    const std::string dir = EVL_TEST_TMP;
    std::string texts[2];
    double seconds = 0;
    for (int i = 0; i < 2; ++i) {
        // same path both times: the report echoes its output settings
        const std::string out = dir + "/reproduce.json";
        const std::string cmd = std::string(EVL_CLI_PATH) + " --json " + out + " reproduce 2>/dev/null";
        const auto t0 = std::chrono::steady_clock::now();
        const int status = std::system(cmd.c_str());
        seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        if (code != 0 && code != 2) return {10, false, "reproduce exited with status " + std::to_string(code)};
        texts[i] = deterministic_part(json::parse(slurp(out))).dump(2);
    }
    const bool same = texts[0] == texts[1];
    return {10, same,
            std::string("repeated reproduce runs ") + (same ? "byte-identical" : "differ") + " outside the timestamp (" +
                std::to_string(texts[0].size()) + " bytes) [" + detail::fmt(seconds, "%.1f") + " s]"};
}

Line run_one(int id, const RunConfig& cfg) {
    switch (id) {
    case 1: return from_check(timed(budget(1), [&] { return check_theta_exact(cfg); }));
    case 2: return from_check(timed(budget(2), [&] { return check_xi_bounds(cfg); }));
    case 3: return from_check(timed(budget(3), [&] { return check_ex2_limit(cfg); }));
    case 4: return from_check(timed(budget(4), [&] { return check_survivor_oracle(cfg); }));
    case 5: return from_check(timed(budget(5), [&] { return check_window_oracle(cfg); }));
    case 6: return from_check(timed(budget(6), [&] { return check_hypothesis_sequences(cfg); }));
    case 7: return from_check(timed(budget(7), [&] { return check_dprime(cfg); }));
    case 8: return from_check(timed(budget(8), [&] { return check_bv_bounds(cfg); }));
    case 9: return from_check(timed(budget(9), [&] { return check_monte_carlo(cfg); }));
    case 10: return determinism();
    }
    return {id, false, "no such criterion"};
}

} // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--criterion") only = std::atoi(argv[i + 1]);
    const RunConfig cfg;
    bool all = true;
    for (int id = 1; id <= 10; ++id) {
        if (only != 0 && id != only) continue;
        Line l;
        try {
            l = run_one(id, cfg);
        } catch (const std::exception& e) {
            l = {id, false, std::string("error: ") + e.what()};
        }
        std::cout << (l.passed ? "PASS" : "FAIL") << " criterion " << l.id << ": " << l.text << std::endl;
        all = all && l.passed;
    }
    return all ? 0 : 1;
}
