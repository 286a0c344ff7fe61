#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "evl/config.hpp"
#include "evl/grid_oracle.hpp"

// The ten reproducible acceptance quantities. Each check computes its numbers, a verdict, and
// a JSON section for the report.

namespace evl {

struct CsvTable {
    std::string name;
    std::string header;
    std::vector<std::string> rows;
};

struct CheckResult {
    int id = 0;
    std::string title;
    bool passed = false;
    std::string summary;
    json detail;
    std::vector<CsvTable> tables;
    double seconds = 0;        // wall clock, filled by timed()
    double limit_seconds = 0;  // 0 when the criterion has no runtime bound
};

// 15-digit decimal value of the Example 1 extremal index.
inline const Rational& theta_ex1_digits() {
    static const Rational v = parse_rational("0.999289701946552");
    return v;
}

template <class Fn>
CheckResult timed(double limit, Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r = fn();
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.limit_seconds = limit;
    return r;
}

namespace detail {

inline std::string fmt(double v, const char* f = "%.6g") {
    char b[64];
    std::snprintf(b, sizeof b, f, v);
    return b;
}

inline std::string dec(const BoundedValue& v, int d = 16) { return to_decimal(v, d); }

} // namespace detail

// 1
inline CheckResult check_theta_exact(const RunConfig& cfg) {
    CheckResult r;
    r.id = 1;
    r.title = "extremal index of Example 1 in closed form";
    const BoundedValue th = theta_closed_form_ex1(cfg.theta_terms, cfg.precision);
    const Rational width = th.upper() - th.lower();
    const Rational miss = detail::abs(Rational(th.value() - theta_ex1_digits()));
    const bool narrow = width < parse_rational("1e-14");
    const bool close = miss <= parse_rational("5e-13");
    const bool contains = th.contains(theta_ex1_digits());
    // A 15-digit decimal cannot sit inside an enclosure of width 1e-153. Instead the whole
    // enclosure has to lie in the rounding cell of that decimal, which is the stronger statement.
    const Rational half_ulp = parse_rational("5e-16");
    const bool rounds = theta_ex1_digits() - half_ulp <= th.lower() && th.upper() < theta_ex1_digits() + half_ulp;
    r.passed = narrow && close && rounds;
    r.summary = "theta = " + detail::dec(th, 20) + ", width " + to_decimal(width, 3) + ", |mid - 0.999289701946552| = " +
                to_decimal(miss, 3);
    r.detail = {{"theta", to_json(th)},
                {"terms", cfg.theta_terms},
                {"width", to_decimal(width, 3)},
                {"distance_to_digits", to_decimal(miss, 3)},
                {"contains_digits", contains},
                {"inside_rounding_cell", rounds},
                {"rounded_15", to_decimal(th, 15)}};
    return r;
}

// 2
inline CheckResult check_xi_bounds(const RunConfig& cfg) {
    CheckResult r;
    r.id = 2;
    r.title = "xi_j inside 3^(-2 3^j) <= xi_j <= 3^(-2 3^j) + (9/8) 3^(-8 3^j)";
    r.passed = true;
    json rows = json::array();
    for (unsigned j = 1; j <= 6; ++j) {
        const auto [lo, hi] = xi_reference_bracket(j);
        // with only the leading term the enclosure touches the lower bracket, so take one more
        const BoundedValue x = xi_point(j, cfg.precision.at_least(j + 2));
        const bool ok = x.strictly_inside(lo, hi);
        r.passed = r.passed && ok;
        rows.push_back({{"j", j},
                        {"xi", detail::dec(x, 12)},
                        {"margin_low", to_decimal(Rational(x.lower() - lo), 4)},
                        {"margin_high", to_decimal(Rational(hi - x.upper()), 4)},
                        {"inside", ok}});
    }
    r.summary = r.passed ? "all six enclosures strictly inside their brackets" : "a bracket is violated";
    r.detail = {{"rows", rows}};
    return r;
}

// 3
inline CheckResult check_ex2_limit(const RunConfig& cfg) {
    CheckResult r;
    r.id = 3;
    r.title = "Example 2 theta_n increasing towards 1";
    const ObservableSpec spec = cfg.spec(ObservableKind::Example2);
    json rows = json::array();
    CsvTable csv{"theta_seq_ex2", "u_n,n,N,theta_formula,theta_geometric,one_minus_theta_formula", {}};
    std::vector<BoundedValue> formula;
    bool agree = true;
    for (const auto& u : cfg.ex2_levels) {
        const LevelPlan plan = plan_at_level(spec, u);
        const BoundedValue tf = theta_n_ex2(plan, cfg.precision);
        const ThresholdAnalysis a = analyze_threshold(spec, plan, cfg.cap);
        const bool overlap = !(tf.upper() < a.theta_n.lower() || a.theta_n.upper() < tf.lower());
        agree = agree && overlap;
        formula.push_back(tf);
        const BoundedValue gap = BoundedValue(1) - tf;
        rows.push_back({{"u_n", to_fraction(u)},
                        {"n", plan.n.get_str()},
                        {"N", plan.N},
                        {"theta_formula", to_json(tf)},
                        {"theta_geometric", to_json(a.theta_n)},
                        {"one_minus_theta", detail::dec(gap, 6)},
                        {"bv_norm_A", a.bv_norm_A},
                        {"formula_matches_geometry", overlap}});
        csv.rows.push_back(to_decimal(u, 6) + "," + plan.n.get_str() + "," + std::to_string(plan.N) + "," +
                           detail::dec(tf, 15) + "," + detail::dec(a.theta_n, 15) + "," + detail::dec(gap, 6));
    }
    bool increasing = true;
    for (std::size_t i = 1; i < formula.size(); ++i)
        increasing = increasing && formula[i - 1].upper() < formula[i].lower();
    const bool near_one =
        !formula.empty() && (BoundedValue(1) - formula.back()).upper() < Rational(1, 1000);
    r.passed = increasing && near_one;
    std::string seq;
    for (const auto& t : formula) seq += (seq.empty() ? "" : ", ") + detail::dec(t, 6);
    r.summary = "theta_n = [" + seq + "]" + (increasing ? "" : "; not increasing") +
                (near_one ? "" : "; |theta_n - 1| >= 1e-3 at the last level") +
                (agree ? "" : "; closed form and geometry disagree");
    r.detail = {{"theta_limit", 1}, {"rows", rows}, {"increasing", increasing}, {"within_1e-3_at_last", near_one},
                {"formula_matches_geometry", agree}};
    r.tables.push_back(std::move(csv));
    return r;
}

inline json oracle_json(const OracleReport& o) {
    return {{"sets", o.sets}, {"checks", o.checks}, {"mismatches", o.mismatches}, {"first_mismatches", o.first_mismatches}};
}

// 4
inline CheckResult check_survivor_oracle(const RunConfig& cfg) {
    CheckResult r;
    r.id = 4;
    r.title = "survivor sets agree with orbit iteration on ternary grids";
    const OracleReport o = survivor_oracle(cfg.oracle_max_digits, cfg.oracle_max_q, cfg.oracle_sets_per_size, cfg.seed, cfg.cap);
    r.passed = o.mismatches == 0 && o.checks > 0;
    r.summary = std::to_string(o.checks) + " grid decisions over " + std::to_string(o.sets) + " sets, " +
                std::to_string(o.mismatches) + " mismatches";
    r.detail = oracle_json(o);
    r.detail["max_digits"] = cfg.oracle_max_digits;
    r.detail["max_q"] = cfg.oracle_max_q;
    return r;
}

// 5
inline CheckResult check_window_oracle(const RunConfig& cfg) {
    CheckResult r;
    r.id = 5;
    r.title = "W_{0,n}(U) equals {M_n <= u} on ternary grids";
    const OracleReport o = window_oracle(cfg.oracle_max_digits, cfg.oracle_max_window, cfg.oracle_sets_per_size, cfg.seed, cfg.cap);
    r.passed = o.mismatches == 0 && o.checks > 0;
    r.summary = std::to_string(o.checks) + " grid decisions over " + std::to_string(o.sets) + " sets, " +
                std::to_string(o.mismatches) + " mismatches";
    r.detail = oracle_json(o);
    r.detail["max_digits"] = cfg.oracle_max_digits;
    r.detail["max_window"] = cfg.oracle_max_window;
    return r;
}

inline std::vector<ThresholdAnalysis> ex1_analyses(const RunConfig& cfg, const std::vector<BigInt>& grid) {
    const ObservableSpec spec = cfg.spec(ObservableKind::Example1);
    std::vector<ThresholdAnalysis> out;
    for (const auto& n : grid) out.push_back(analyze_threshold(spec, level_for_tau(spec, n, cfg.tau), cfg.cap));
    return out;
}

// 6
inline CheckResult check_hypothesis_sequences(const RunConfig& cfg) {
    CheckResult r;
    r.id = 6;
    r.title = "hypotheses H1 and H2 decrease along n";
    const auto analyses = ex1_analyses(cfg, cfg.hypothesis_n_grid);
    const HypothesisTable t = check_hypotheses(analyses, cfg.decay, ObservableKind::Example1);
    std::size_t from = 0;
    while (from < t.rows.size() && t.rows[from].n < 1000) ++from;
    bool h1 = true, h2 = true;
    for (std::size_t i = from + 1; i < t.rows.size(); ++i) {
        h1 = h1 && t.rows[i].H1 < t.rows[i - 1].H1;
        h2 = h2 && t.rows[i].H2 < t.rows[i - 1].H2;
    }
    const bool small = !t.rows.empty() && t.rows.back().H1 < Rational(1, 1'000'000);
    r.passed = h1 && h2 && small;
    std::string h2s;
    for (const auto& row : t.rows) h2s += (h2s.empty() ? "" : ", ") + to_decimal(row.H2, 4);
    r.summary = std::string("H1 ") + (h1 ? "decreasing" : "not decreasing") + ", H2 " +
                (h2 ? "decreasing" : "not decreasing") + " from n = 1000; H1(last) = " +
                (t.rows.empty() ? std::string("-") : to_decimal(t.rows.back().H1, 4)) + "; H2 = [" + h2s + "]";
    r.detail = to_json(t);
    r.detail["decay"] = {{"C", to_fraction(cfg.decay.C)}, {"r", to_fraction(cfg.decay.r)}};
    r.detail["H1_decreasing"] = h1;
    r.detail["H2_decreasing"] = h2;
    r.detail["H1_last_below_1e-6"] = small;
    CsvTable csv{"hypotheses", "n,N,t,bv_norm,bv_bound,H1,H2,H1_bound,H2_bound", {}};
    for (const auto& row : t.rows)
        csv.rows.push_back(row.n.get_str() + "," + std::to_string(row.N) + "," + row.t.get_str() + "," +
                           std::to_string(row.bv_norm) + "," + std::to_string(row.bv_bound) + "," +
                           to_decimal(row.H1, 10) + "," + to_decimal(row.H2, 10) + "," + to_decimal(row.H1_bound, 10) +
                           "," + to_decimal(row.H2_bound, 10));
    r.tables.push_back(std::move(csv));
    return r;
}

// 7
inline CheckResult check_dprime(const RunConfig& cfg) {
    CheckResult r;
    r.id = 7;
    r.title = "D' sums for Example 2 at desk scale";
    const ObservableSpec spec = cfg.spec(ObservableKind::Example2);
    json rows = json::array();
    std::vector<BoundedValue> values;
    bool exact = true;
    CsvTable csv{"dprime", "n,q,k,j_first,j_last,value,estimate_violations", {}};
    for (const auto& n : cfg.dprime_n_grid) {
        const LevelPlan plan = level_for_tau(spec, n, cfg.tau);
        const DprimeResult d = dprime_sum(spec, plan, cfg.decay, cfg.cap);
        values.push_back(d.value);
        exact = exact && d.value.radius() < parse_rational("1e-12") * (d.value.value() + 1);
        rows.push_back(to_json(d));
        csv.rows.push_back(n.get_str() + "," + std::to_string(d.q) + "," + d.k.get_str() + "," +
                           std::to_string(d.j_first) + "," + std::to_string(d.j_last) + "," + detail::dec(d.value, 15) +
                           "," + std::to_string(d.violations));
    }
    bool nonincreasing = true;
    for (std::size_t i = 1; i < values.size(); ++i) nonincreasing = nonincreasing && values[i].upper() <= values[i - 1].lower();
    r.passed = exact && nonincreasing && !values.empty();
    std::string seq;
    for (const auto& v : values) seq += (seq.empty() ? "" : ", ") + detail::dec(v, 8);
    r.summary = "n sum = [" + seq + "]" + (nonincreasing ? "" : "; increases along the grid");
    r.detail = {{"rows", rows}, {"nonincreasing", nonincreasing}, {"exact", exact}};
    r.tables.push_back(std::move(csv));
    return r;
}

// 8
inline CheckResult check_bv_bounds(const RunConfig& cfg) {
    CheckResult r;
    r.id = 8;
    r.title = "BV norms within the component bounds";
    json rows = json::array();
    r.passed = true;
    std::string bad;
    auto record = [&](const char* ex, const ThresholdAnalysis& a, ObservableKind kind) {
        const unsigned bound = bv_bound_for(kind, a.plan.N);
        const bool ok = a.bv_norm_A <= bound;
        r.passed = r.passed && ok;
        if (!ok) bad += std::string(bad.empty() ? "" : "; ") + ex + " n=" + a.plan.n.get_str() + ": " +
                        std::to_string(a.bv_norm_A) + " > " + std::to_string(bound);
        const std::string n = a.plan.n.get_str();
        rows.push_back({{"example", ex},
                        {"n", n.size() > 40 ? "~" + detail::dec(BoundedValue(Rational(a.plan.n)), 6) : n},
                        {"N", a.plan.N},
                        {"bv_norm", a.bv_norm_A},
                        {"bound", bound},
                        {"ok", ok}});
    };
    std::vector<BigInt> grid = cfg.hypothesis_n_grid;
    for (const auto& n : cfg.ex1_n_grid)
        if (std::find(grid.begin(), grid.end(), n) == grid.end()) grid.push_back(n);
    for (unsigned e : cfg.ex1_pow3_grid) grid.push_back(detail::pow_ui(3, e));
    for (const auto& a : ex1_analyses(cfg, grid)) record("ex1", a, ObservableKind::Example1);
    const ObservableSpec s2 = cfg.spec(ObservableKind::Example2);
    for (const auto& u : cfg.ex2_levels) record("ex2", analyze_threshold(s2, plan_at_level(s2, u), cfg.cap), ObservableKind::Example2);
    for (const auto& n : cfg.dprime_n_grid)
        record("ex2", analyze_threshold(s2, level_for_tau(s2, n, cfg.tau), cfg.cap), ObservableKind::Example2);
    r.summary = r.passed ? "all plans within their bounds" : bad;
    r.detail = {{"rows", rows}};
    return r;
}

// 9
inline CheckResult check_monte_carlo(const RunConfig& cfg) {
    CheckResult r;
    r.id = 9;
    r.title = "Monte Carlo block maxima follow exp(-theta tau)";
    const ObservableSpec spec = cfg.spec(ObservableKind::Example1);
    MonteCarloConfig mc;
    mc.samples = cfg.mc_samples;
    mc.seed = cfg.seed;
    mc.verify_stride = 100;
    const auto curve = evl_curve(spec, cfg.mc_n, cfg.mc_taus, mc);
    r.passed = !curve.empty();
    json rows = json::array();
    CsvTable csv{"mc_curve", mc_csv_header(), {}};
    std::string zs;
    // finite-n reference: survivor ratio with a long run length at the same plan
    std::optional<BoundedValue> theta_long;
    for (const auto& e : curve) {
        const double ref = e.reference.to_double();
        const double z = e.std_err > 0 ? (e.p_hat.get_d() - ref) / e.std_err : 0.0;
        const bool ok = std::abs(e.p_hat.get_d() - ref) <= 3 * e.std_err;
        r.passed = r.passed && ok;
        if (!theta_long) {
            const SpecialPoints pts(spec.precision.at_least(e.plan.N + 2));
            const ExceedanceSet U = exceedance_set(spec, pts, e.plan.u);
            const IntervalUnion Ut = truncate_exceedance(U, e.plan.N).set;
            theta_long = survivor_set(Ut, cfg.mc_diagnostic_q, cfg.cap).measure() / Ut.measure();
        }
        const double ref_n = exp_neg(*theta_long * e.plan.tau).to_double();
        const double z_n = e.std_err > 0 ? (e.p_hat.get_d() - ref_n) / e.std_err : 0.0;
        json row = to_json(e);
        row["z_score"] = z;
        row["within_3_se"] = ok;
        row["finite_n_reference"] = ref_n;
        row["finite_n_z_score"] = z_n;
        rows.push_back(std::move(row));
        csv.rows.push_back(mc_csv_row(e));
        zs += (zs.empty() ? "" : ", ") + detail::fmt(z, "%.2f");
    }
    r.summary = "z-scores against exp(-theta tau): [" + zs + "]";
    r.detail = {{"n", cfg.mc_n.get_str()},
                {"samples", cfg.mc_samples},
                {"seed", cfg.seed},
                {"rows", rows},
                {"finite_n_theta", theta_long ? to_json(*theta_long) : json(nullptr)},
                {"finite_n_q", cfg.mc_diagnostic_q}};
    r.tables.push_back(std::move(csv));
    return r;
}

/// Example 1 theta_n along the configured grids (report section, no verdict of its own).
inline json theta_sequence_ex1(const RunConfig& cfg, CsvTable& csv) {
    const BoundedValue th = theta_closed_form_ex1(cfg.theta_terms, cfg.precision);
    std::vector<BigInt> grid = cfg.ex1_n_grid;
    for (unsigned e : cfg.ex1_pow3_grid) grid.push_back(detail::pow_ui(3, e));
    json rows = json::array();
    csv = {"theta_seq_ex1", "n,N,theta_n,gap_to_theta,bv_norm,discarded_ratio", {}};
    for (const auto& a : ex1_analyses(cfg, grid)) {
        const BoundedValue gap = a.theta_n - th;
        json row = to_json(a);
        row["gap_to_theta"] = detail::dec(gap, 6);
        const std::string n = a.plan.n.get_str();
        row["plan"].erase("u_n");
        row["plan"]["u_n_decimal"] = detail::dec(a.plan.u, 30);
        rows.push_back(std::move(row));
        csv.rows.push_back((n.size() > 20 ? to_decimal(Rational(a.plan.n), 6) : n) + "," + std::to_string(a.plan.N) +
                           "," + detail::dec(a.theta_n, 18) + "," + detail::dec(gap, 6) + "," +
                           std::to_string(a.bv_norm_A) + "," + to_decimal(a.discarded_ratio, 4));
    }
    return {{"theta", to_json(th)}, {"rows", rows}};
}

/// Runs declustering at a ball around the fixed point 0 against its exact survivor ratio.
inline json runs_diagnostic(const RunConfig& cfg) {
    GenericObservable g;
    g.h_type = 3;
    g.param = 1;
    g.top = 1;
    g.centre = 0;
    g.q = 1;
    const ObservableSpec spec = ObservableSpec::generic_at(g, cfg.precision);
    const LevelPlan plan = level_for_tau(spec, cfg.runs_n, cfg.tau);
    const ThresholdAnalysis a = analyze_threshold(spec, plan, cfg.cap);
    const RunsEstimate e = runs_ei_estimate(spec, plan, cfg.runs_orbit_length, cfg.seed);
    const double exact = a.theta_n.to_double();
    return {{"set", "ball [0, eps) around the fixed point 0"},
            {"plan", to_json(plan)},
            {"exact_survivor_ratio", to_json(a.theta_n)},
            {"estimate", to_json(e)},
            {"exact_inside_ci", e.ci_low <= exact && exact <= e.ci_high}};
}

} // namespace evl
