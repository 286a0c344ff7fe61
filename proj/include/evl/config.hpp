#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "evl/json_io.hpp"

namespace evl {

inline constexpr const char* kTRuleCeilSqrt = "ceil_sqrt";
inline constexpr const char* kKRuleFloorFourthRoot = "floor_fourth_root";

struct RunConfig {
    ObservableKind observable = ObservableKind::Example1;
    PrecisionConfig precision{};
    GenericObservable generic{};
    DecayModel decay{};
    std::string t_rule = kTRuleCeilSqrt;
    std::string k_rule = kKRuleFloorFourthRoot;
    std::size_t cap = kDefaultIntervalCap;
    std::string json_out;
    std::string csv_dir;
    std::uint64_t seed = 20170901;

    unsigned theta_terms = 3;
    Rational tau = 1;
    std::vector<BigInt> ex1_n_grid{1000, 10000, 100000, 1000000};
    std::vector<unsigned> ex1_pow3_grid{9, 27, 81, 243}; // extra Example 1 plans at n = 3^e
    std::vector<Rational> ex2_levels{20, 40, 60, 80};
    std::vector<BigInt> hypothesis_n_grid{100, 1000, 10000, 100000, 1000000};
    std::vector<BigInt> dprime_n_grid{100, 150, 200};
    BigInt mc_n = 5000;
    std::vector<Rational> mc_taus{Rational(1, 2), Rational(1), Rational(2)};
    std::uint64_t mc_samples = 20000;
    unsigned mc_diagnostic_q = 10; // run length for the finite-n reference
    std::uint64_t runs_orbit_length = 2000000;
    BigInt runs_n = 1000;
    unsigned oracle_max_digits = 10;
    unsigned oracle_max_q = 6;
    unsigned oracle_max_window = 8;
    unsigned oracle_sets_per_size = 4;

    ObservableSpec spec(ObservableKind k) const {
        switch (k) {
        case ObservableKind::Example1: return ObservableSpec::example1(precision);
        case ObservableKind::Example2: return ObservableSpec::example2(precision);
        case ObservableKind::Generic: return ObservableSpec::generic_at(generic, precision);
        }
        return ObservableSpec::example1(precision);
    }
    ObservableSpec spec() const { return spec(observable); }

    void validate() const {
        precision.validate();
        decay.validate();
        if (observable == ObservableKind::Generic) generic.validate();
        if (t_rule != kTRuleCeilSqrt) throw BadConfig("unknown t_n rule '" + t_rule + "'");
        if (k_rule != kKRuleFloorFourthRoot) throw BadConfig("unknown k_n rule '" + k_rule + "'");
        if (cap == 0) throw BadConfig("interval cap must be positive");
        if (tau <= 0) throw BadConfig("tau must be positive");
        if (mc_samples == 0) throw BadConfig("mc_samples must be positive");
        if (theta_terms == 0) throw BadConfig("theta_terms must be positive");
        if (oracle_max_digits > 12) throw BadConfig("oracle_max_digits must be at most 12");
    }
};

inline ObservableKind parse_observable(const std::string& s) {
    if (s == "ex1") return ObservableKind::Example1;
    if (s == "ex2") return ObservableKind::Example2;
    if (s == "generic") return ObservableKind::Generic;
    throw BadConfig("unknown observable '" + s + "' (expected ex1, ex2 or generic)");
}

namespace detail {

template <class T, class F>
json list_json(const std::vector<T>& v, F f) {
    json a = json::array();
    for (const auto& x : v) a.push_back(f(x));
    return a;
}

inline BigInt parse_bigint(const json& j) {
    if (j.is_number_unsigned() || j.is_number_integer()) return BigInt(std::to_string(j.get<long long>()));
    try {
        return BigInt(j.get<std::string>(), 10);
    } catch (const std::invalid_argument&) {
        throw BadConfig("not an integer: " + j.dump());
    }
}

inline Rational parse_rational_json(const json& j) {
    if (j.is_number_integer()) return Rational(j.get<long>());
    try {
        return parse_rational(j.get<std::string>());
    } catch (const std::invalid_argument&) {
        throw BadConfig("not a rational: " + j.dump());
    }
}

} // namespace detail

inline json to_json(const RunConfig& c) {
    auto big = [](const BigInt& b) { return b.get_str(); };
    auto rat = [](const Rational& q) { return to_fraction(q); };
    json j;
    j["observable"] = to_string(c.observable);
    j["precision"] = {{"depth", c.precision.depth}, {"max_depth", c.precision.max_depth}};
    j["generic"] = {{"h_type", c.generic.h_type},
                    {"param", rat(c.generic.param)},
                    {"top", rat(c.generic.top)},
                    {"centre", rat(c.generic.centre)},
                    {"q", c.generic.q}};
    j["decay"] = {{"C", rat(c.decay.C)}, {"r", rat(c.decay.r)}};
    j["sequences"] = {{"t_n", c.t_rule}, {"k_n", c.k_rule}};
    j["cap"] = c.cap;
    j["outputs"] = {{"json", c.json_out}, {"csv_dir", c.csv_dir}};
    j["seed"] = c.seed;
    j["theta_terms"] = c.theta_terms;
    j["tau"] = rat(c.tau);
    j["ex1_n_grid"] = detail::list_json(c.ex1_n_grid, big);
    j["ex1_pow3_grid"] = c.ex1_pow3_grid;
    j["ex2_levels"] = detail::list_json(c.ex2_levels, rat);
    j["hypothesis_n_grid"] = detail::list_json(c.hypothesis_n_grid, big);
    j["dprime_n_grid"] = detail::list_json(c.dprime_n_grid, big);
    j["monte_carlo"] = {{"n", big(c.mc_n)},
                        {"taus", detail::list_json(c.mc_taus, rat)},
                        {"samples", c.mc_samples},
                        {"diagnostic_q", c.mc_diagnostic_q},
                        {"runs_orbit_length", c.runs_orbit_length},
                        {"runs_n", big(c.runs_n)}};
    j["oracle"] = {{"max_digits", c.oracle_max_digits},
                   {"max_q", c.oracle_max_q},
                   {"max_window", c.oracle_max_window},
                   {"sets_per_size", c.oracle_sets_per_size}};
    return j;
}

/// Fields missing from `j` keep their current values in `c`.
inline void merge_json(RunConfig& c, const json& j) {
    try {
        if (j.contains("observable")) c.observable = parse_observable(j["observable"].get<std::string>());
        if (j.contains("precision")) {
            const auto& p = j["precision"];
            if (p.contains("depth")) c.precision.depth = p["depth"].get<unsigned>();
            if (p.contains("max_depth")) c.precision.max_depth = p["max_depth"].get<unsigned>();
        }
        if (j.contains("generic")) {
            const auto& g = j["generic"];
            if (g.contains("h_type")) c.generic.h_type = g["h_type"].get<int>();
            if (g.contains("param")) c.generic.param = detail::parse_rational_json(g["param"]);
            if (g.contains("top")) c.generic.top = detail::parse_rational_json(g["top"]);
            if (g.contains("centre")) c.generic.centre = detail::parse_rational_json(g["centre"]);
            if (g.contains("q")) c.generic.q = g["q"].get<unsigned>();
        }
        if (j.contains("decay")) {
            if (j["decay"].contains("C")) c.decay.C = detail::parse_rational_json(j["decay"]["C"]);
            if (j["decay"].contains("r")) c.decay.r = detail::parse_rational_json(j["decay"]["r"]);
        }
        if (j.contains("sequences")) {
            if (j["sequences"].contains("t_n")) c.t_rule = j["sequences"]["t_n"].get<std::string>();
            if (j["sequences"].contains("k_n")) c.k_rule = j["sequences"]["k_n"].get<std::string>();
        }
        if (j.contains("cap")) c.cap = j["cap"].get<std::size_t>();
        if (j.contains("outputs")) {
            if (j["outputs"].contains("json")) c.json_out = j["outputs"]["json"].get<std::string>();
            if (j["outputs"].contains("csv_dir")) c.csv_dir = j["outputs"]["csv_dir"].get<std::string>();
        }
        if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("theta_terms")) c.theta_terms = j["theta_terms"].get<unsigned>();
        if (j.contains("tau")) c.tau = detail::parse_rational_json(j["tau"]);
        auto bigs = [](const json& a) {
            std::vector<BigInt> v;
            for (const auto& x : a) v.push_back(detail::parse_bigint(x));
            return v;
        };
        auto rats = [](const json& a) {
            std::vector<Rational> v;
            for (const auto& x : a) v.push_back(detail::parse_rational_json(x));
            return v;
        };
        if (j.contains("ex1_n_grid")) c.ex1_n_grid = bigs(j["ex1_n_grid"]);
        if (j.contains("ex1_pow3_grid")) c.ex1_pow3_grid = j["ex1_pow3_grid"].get<std::vector<unsigned>>();
        if (j.contains("ex2_levels")) c.ex2_levels = rats(j["ex2_levels"]);
        if (j.contains("hypothesis_n_grid")) c.hypothesis_n_grid = bigs(j["hypothesis_n_grid"]);
        if (j.contains("dprime_n_grid")) c.dprime_n_grid = bigs(j["dprime_n_grid"]);
        if (j.contains("monte_carlo")) {
            const auto& m = j["monte_carlo"];
            if (m.contains("n")) c.mc_n = detail::parse_bigint(m["n"]);
            if (m.contains("taus")) c.mc_taus = rats(m["taus"]);
            if (m.contains("samples")) c.mc_samples = m["samples"].get<std::uint64_t>();
            if (m.contains("diagnostic_q")) c.mc_diagnostic_q = m["diagnostic_q"].get<unsigned>();
            if (m.contains("runs_orbit_length")) c.runs_orbit_length = m["runs_orbit_length"].get<std::uint64_t>();
            if (m.contains("runs_n")) c.runs_n = detail::parse_bigint(m["runs_n"]);
        }
        if (j.contains("oracle")) {
            const auto& o = j["oracle"];
            if (o.contains("max_digits")) c.oracle_max_digits = o["max_digits"].get<unsigned>();
            if (o.contains("max_q")) c.oracle_max_q = o["max_q"].get<unsigned>();
            if (o.contains("max_window")) c.oracle_max_window = o["max_window"].get<unsigned>();
            if (o.contains("sets_per_size")) c.oracle_sets_per_size = o["sets_per_size"].get<unsigned>();
        }
    } catch (const json::exception& e) {
        throw BadConfig(std::string("malformed config: ") + e.what());
    }
}

inline RunConfig config_from_json(const json& j) {
    RunConfig c;
    merge_json(c, j);
    c.validate();
    return c;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw BadConfig("cannot read config file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw BadConfig("config file " + path + " is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

} // namespace evl
