#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "evl/evl.hpp"

using namespace evl;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAcceptance = 2;
constexpr int kExitPrecision = 3;
constexpr int kExitConfig = 4;

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

Rational rational_arg(const std::string& s, const char* what) {
    try {
        return parse_rational(s);
    } catch (const std::exception&) {
        throw BadConfig(std::string("bad ") + what + " '" + s + "'");
    }
}

// accepts 1000, 1e6, 3^27
BigInt integer_arg(const std::string& s, const char* what) {
    if (auto caret = s.find('^'); caret != std::string::npos) {
        try {
            return detail::pow_ui(std::stoul(s.substr(0, caret)), std::stoul(s.substr(caret + 1)));
        } catch (const std::exception&) {
            throw BadConfig(std::string("bad ") + what + " '" + s + "'");
        }
    }
    const Rational q = rational_arg(s, what);
    if (q.get_den() != 1 || q <= 0) throw BadConfig(std::string(what) + " must be a positive integer, got '" + s + "'");
    return q.get_num();
}

std::vector<Rational> rational_list(const std::string& s, const char* what) {
    std::vector<Rational> v;
    for (const auto& x : split_list(s)) v.push_back(rational_arg(x, what));
    if (v.empty()) throw BadConfig(std::string("empty ") + what);
    return v;
}

std::vector<BigInt> integer_list(const std::string& s, const char* what) {
    std::vector<BigInt> v;
    for (const auto& x : split_list(s)) v.push_back(integer_arg(x, what));
    if (v.empty()) throw BadConfig(std::string("empty ") + what);
    return v;
}

struct Globals {
    std::string config;
    std::optional<unsigned> depth, max_depth;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> cap;
    std::string json_out, csv_out, observable;
};

RunConfig resolve(const Globals& g) {
    RunConfig c = g.config.empty() ? RunConfig{} : load_config(g.config);
    if (g.depth) c.precision.depth = *g.depth;
    if (g.max_depth) c.precision.max_depth = *g.max_depth;
    if (g.seed) c.seed = *g.seed;
    if (g.cap) c.cap = *g.cap;
    if (!g.json_out.empty()) c.json_out = g.json_out;
    if (!g.csv_out.empty()) c.csv_dir = g.csv_out;
    if (!g.observable.empty()) c.observable = parse_observable(g.observable);
    c.validate();
    return c;
}

void emit(const RunConfig& c, const json& doc) {
    const std::string text = doc.dump(2);
    if (c.json_out.empty()) {
        std::cout << text << "\n";
        return;
    }
    std::ofstream out(c.json_out);
    if (!out) throw BadConfig("cannot write " + c.json_out);
    out << text << "\n";
}

void emit_csv(const std::string& path, const CsvTable& t) {
    if (path.empty()) return;
    std::ofstream out(path);
    if (!out) throw BadConfig("cannot write " + path);
    out << t.header << "\n";
    for (const auto& r : t.rows) out << r << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Extreme value laws and extremal indices for the tripling map"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config, "JSON run configuration");
    app.add_option("--depth", g.depth, "number of special points resolved");
    app.add_option("--max-depth", g.max_depth, "ceiling for automatic depth doubling");
    app.add_option("--seed", g.seed, "random seed");
    app.add_option("--json", g.json_out, "write the JSON result here instead of stdout");
    app.add_option("--csv", g.csv_out, "CSV output (a file, or a directory for reproduce)");
    app.add_option("--cap", g.cap, "maximum number of intervals in any union");
    app.add_option("--observable", g.observable, "ex1, ex2 or generic")->check(CLI::IsMember({"ex1", "ex2", "generic"}));
    app.fallthrough();

    auto* theta_exact = app.add_subcommand("theta-exact", "closed-form extremal index of Example 1");
    std::optional<unsigned> terms;
    theta_exact->add_option("--terms", terms, "number of series terms");

    auto* theta_seq = app.add_subcommand("theta-seq", "theta_n along a grid of n (or of levels u)");
    std::string tau_s, n_grid_s, u_grid_s;
    theta_seq->add_option("--tau", tau_s);
    theta_seq->add_option("--n-grid", n_grid_s, "comma separated n values");
    theta_seq->add_option("--u-grid", u_grid_s, "comma separated levels, used instead of --n-grid");

    auto* conditions = app.add_subcommand("conditions", "H1/H2 sequences for a decay model");
    std::string r_s, c_s, cond_grid_s, cond_tau_s;
    conditions->add_option("--r", r_s, "decay ratio");
    conditions->add_option("--C", c_s, "decay constant");
    conditions->add_option("--n-grid", cond_grid_s);
    conditions->add_option("--tau", cond_tau_s);

    auto* dprime = app.add_subcommand("dprime", "exact D' sum at one n");
    std::string dn_s, dtau_s;
    dprime->add_option("--n", dn_s)->required();
    dprime->add_option("--tau", dtau_s);

    auto* mc = app.add_subcommand("mc", "Monte Carlo estimate of P(M_n <= u_n)");
    std::string mc_n_s, mc_tau_s, mc_grid_s;
    std::optional<std::uint64_t> mc_samples;
    mc->add_option("--n", mc_n_s);
    mc->add_option("--tau", mc_tau_s);
    mc->add_option("--tau-grid", mc_grid_s, "comma separated, increasing");
    mc->add_option("--samples", mc_samples);

    auto* reproduce = app.add_subcommand("reproduce", "regenerate every acceptance number");

    auto* levels = app.add_subcommand("levels", "level plan u_n with mu(U) ~ tau/n");
    std::string lv_n_s, lv_tau_s, lv_u_s;
    levels->add_option("--n", lv_n_s);
    levels->add_option("--tau", lv_tau_s);
    levels->add_option("--u", lv_u_s, "fix the level instead of n");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        RunConfig cfg = resolve(g);
        const ObservableSpec spec = cfg.spec();

        if (*theta_exact) {
            if (cfg.observable != ObservableKind::Example1) throw BadConfig("theta-exact is only available for ex1");
            if (terms) cfg.theta_terms = *terms;
            CheckResult r = check_theta_exact(cfg);
            emit(cfg, r.detail);
            return kExitOk;
        }

        if (*theta_seq) {
            const Rational tau = tau_s.empty() ? cfg.tau : rational_arg(tau_s, "tau");
            std::vector<LevelPlan> plans;
            if (!u_grid_s.empty()) {
                for (const auto& u : rational_list(u_grid_s, "u grid")) plans.push_back(plan_at_level(spec, u));
            } else {
                const auto grid = n_grid_s.empty() ? cfg.ex1_n_grid : integer_list(n_grid_s, "n grid");
                for (const auto& n : grid) plans.push_back(level_for_tau(spec, n, tau));
            }
            json rows = json::array();
            CsvTable csv{"theta_seq", "n,u_n,N,theta_n,bv_norm", {}};
            for (const auto& p : plans) {
                const ThresholdAnalysis a = analyze_threshold(spec, p, cfg.cap);
                json row = to_json(a);
                if (spec.kind == ObservableKind::Example2) row["theta_formula"] = to_json(theta_n_ex2(p, cfg.precision));
                rows.push_back(std::move(row));
                csv.rows.push_back(p.n.get_str() + "," + to_decimal(p.u, 30) + "," + std::to_string(p.N) + "," +
                                   to_decimal(a.theta_n, 18) + "," + std::to_string(a.bv_norm_A));
            }
            json doc{{"observable", to_string(spec.kind)}, {"rows", rows}};
            if (spec.kind == ObservableKind::Example1)
                doc["theta"] = to_json(theta_closed_form_ex1(cfg.theta_terms, cfg.precision));
            if (spec.kind == ObservableKind::Example2) doc["theta_limit"] = 1;
            emit(cfg, doc);
            emit_csv(cfg.csv_dir, csv);
            return kExitOk;
        }

        if (*conditions) {
            if (!r_s.empty()) cfg.decay.r = rational_arg(r_s, "r");
            if (!c_s.empty()) cfg.decay.C = rational_arg(c_s, "C");
            cfg.decay.validate();
            const Rational tau = cond_tau_s.empty() ? cfg.tau : rational_arg(cond_tau_s, "tau");
            const auto grid = cond_grid_s.empty() ? cfg.hypothesis_n_grid : integer_list(cond_grid_s, "n grid");
            std::vector<ThresholdAnalysis> as;
            for (const auto& n : grid) as.push_back(analyze_threshold(spec, level_for_tau(spec, n, tau), cfg.cap));
            const HypothesisTable t = check_hypotheses(as, cfg.decay, spec.kind);
            emit(cfg, to_json(t));
            CsvTable csv{"conditions", "n,N,t,bv_norm,bv_bound,H1,H2", {}};
            for (const auto& row : t.rows)
                csv.rows.push_back(row.n.get_str() + "," + std::to_string(row.N) + "," + row.t.get_str() + "," +
                                   std::to_string(row.bv_norm) + "," + std::to_string(row.bv_bound) + "," +
                                   to_decimal(row.H1, 10) + "," + to_decimal(row.H2, 10));
            emit_csv(cfg.csv_dir, csv);
            return kExitOk;
        }

        if (*dprime) {
            const Rational tau = dtau_s.empty() ? cfg.tau : rational_arg(dtau_s, "tau");
            const LevelPlan plan = level_for_tau(spec, integer_arg(dn_s, "n"), tau);
            emit(cfg, to_json(dprime_sum(spec, plan, cfg.decay, cfg.cap)));
            return kExitOk;
        }

        if (*mc) {
            const BigInt n = mc_n_s.empty() ? cfg.mc_n : integer_arg(mc_n_s, "n");
            std::vector<Rational> taus;
            if (!mc_grid_s.empty())
                taus = rational_list(mc_grid_s, "tau grid");
            else if (!mc_tau_s.empty())
                taus = {rational_arg(mc_tau_s, "tau")};
            else
                taus = cfg.mc_taus;
            MonteCarloConfig m;
            m.samples = mc_samples ? *mc_samples : cfg.mc_samples;
            m.seed = cfg.seed;
            const auto curve = evl_curve(spec, n, taus, m);
            json rows = json::array();
            CsvTable csv{"mc", mc_csv_header(), {}};
            for (const auto& e : curve) {
                rows.push_back(to_json(e));
                csv.rows.push_back(mc_csv_row(e));
            }
            emit(cfg, {{"observable", to_string(spec.kind)}, {"rows", rows}});
            emit_csv(cfg.csv_dir, csv);
            return kExitOk;
        }

        if (*reproduce) {
            const Report rep = run_reproduction(cfg);
            emit(cfg, rep.doc);
            write_tables(rep.tables, cfg.csv_dir);
            for (const auto& c : rep.checks)
                std::cerr << (c.passed ? "PASS " : "FAIL ") << c.id << " " << c.title << ": " << c.summary << "\n";
            return rep.all_passed() ? kExitOk : kExitAcceptance;
        }

        if (*levels) {
            LevelPlan plan;
            if (!lv_u_s.empty())
                plan = plan_at_level(spec, rational_arg(lv_u_s, "u"));
            else
                plan = level_for_tau(spec, lv_n_s.empty() ? cfg.mc_n : integer_arg(lv_n_s, "n"),
                                     lv_tau_s.empty() ? cfg.tau : rational_arg(lv_tau_s, "tau"));
            emit(cfg, to_json(plan));
            return kExitOk;
        }
    } catch (const BadConfig& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    } catch (const PrecisionExhausted& e) {
        std::cerr << e.what() << "\n";
        return kExitPrecision;
    } catch (const CapExceeded& e) {
        std::cerr << e.what() << "\n";
        return kExitPrecision;
    } catch (const GuardExhausted& e) {
        std::cerr << e.what() << "\n";
        return kExitPrecision;
    } catch (const Error& e) {
        // level or sample problems come from the requested parameters
        std::cerr << e.what() << "\n";
        return kExitConfig;
    }
    return kExitOk;
}
