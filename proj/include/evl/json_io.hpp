#pragma once

#include <json.hpp>

#include <string>

#include "evl/extremal_index.hpp"
#include "evl/monte_carlo.hpp"

namespace evl {

using json = nlohmann::json;

inline json to_json(const Rational& q) { return json{{"exact", to_fraction(q)}, {"decimal", to_decimal(q)}}; }

inline json to_json(const BoundedValue& v) {
    json j{{"value", to_fraction(v.value())}, {"decimal", to_decimal(v.value())}};
    j["radius"] = to_fraction(v.radius());
    j["radius_decimal"] = v.is_exact() ? std::string("0") : to_decimal(v.radius(), 3);
    return j;
}

inline json to_json(const IntervalUnion& u) {
    json arr = json::array();
    for (const auto& iv : u.parts()) {
        json p{{"lo", to_fraction(iv.lo.value())},
               {"hi", to_fraction(iv.hi.value())},
               {"lo_closed", iv.lo_closed},
               {"hi_closed", iv.hi_closed}};
        if (!iv.lo.is_exact()) p["lo_radius"] = to_fraction(iv.lo.radius());
        if (!iv.hi.is_exact()) p["hi_radius"] = to_fraction(iv.hi.radius());
        arr.push_back(std::move(p));
    }
    return arr;
}

inline IntervalUnion interval_union_from_json(const json& arr) {
    std::vector<Interval> raw;
    for (const auto& p : arr) {
        auto end = [&](const char* key, const char* rkey) {
            Rational r = p.contains(rkey) ? parse_rational(p.at(rkey).get<std::string>()) : Rational(0);
            return BoundedValue(parse_rational(p.at(key).get<std::string>()), r);
        };
        raw.push_back({end("lo", "lo_radius"), end("hi", "hi_radius"), p.at("lo_closed").get<bool>(),
                       p.at("hi_closed").get<bool>()});
    }
    return IntervalUnion::normalize(std::move(raw));
}

inline json to_json(const LevelPlan& p) {
    return json{{"n", p.n.get_str()}, {"tau", to_json(p.tau)}, {"u_n", to_json(p.u)}, {"mu_U", to_json(p.mu)},
                {"N", p.N},           {"q", p.q},              {"t", p.t.get_str()}, {"k", p.k.get_str()}};
}

inline json to_json(const ThresholdAnalysis& a) {
    return json{{"plan", to_json(a.plan)},
                {"depth", a.depth},
                {"mu_U", to_json(a.mu_U)},
                {"mu_U_tilde", to_json(a.mu_U_tilde)},
                {"mu_A", to_json(a.mu_A)},
                {"theta_n", to_json(a.theta_n)},
                {"bv_norm_A", a.bv_norm_A},
                {"components_A", a.A_set.components()},
                {"discarded_ratio", to_decimal(a.discarded_ratio, 6)}};
}

inline json to_json(const HypothesisTable& t) {
    json rows = json::array();
    for (const auto& r : t.rows)
        rows.push_back(json{{"n", r.n.get_str()},
                            {"N", r.N},
                            {"t", r.t.get_str()},
                            {"bv_norm", r.bv_norm},
                            {"bv_bound", r.bv_bound},
                            {"H1", to_decimal(r.H1, 12)},
                            {"H2", to_decimal(r.H2, 12)},
                            {"H1_bound", to_decimal(r.H1_bound, 12)},
                            {"H2_bound", to_decimal(r.H2_bound, 12)}});
    json j{{"rows", rows}};
    j["onset_H1"] = t.onset_H1 ? json(*t.onset_H1) : json(nullptr);
    j["onset_H2"] = t.onset_H2 ? json(*t.onset_H2) : json(nullptr);
    return j;
}

inline json to_json(const DprimeResult& d) {
    json terms = json::array();
    for (const auto& t : d.terms)
        terms.push_back(json{{"j", t.j},
                             {"overlap", to_decimal(t.overlap, 12)},
                             {"estimate_rhs", to_decimal(t.rhs, 12)},
                             {"within", t.within}});
    return json{{"n", d.n.get_str()},         {"q", d.q},
                {"k", d.k.get_str()},         {"j_first", d.j_first},
                {"j_last", d.j_last},         {"mu_A", to_json(d.mu_A)},
                {"bv_norm_A", d.bv_norm_A},   {"value", to_json(d.value)},
                {"estimate_violations", d.violations}, {"terms", terms}};
}

inline json to_json(const ExperimentResult& r) {
    return json{{"plan", to_json(r.plan)},
                {"samples", r.samples},
                {"hits", r.hits},
                {"p_hat", to_json(r.p_hat)},
                {"std_err", r.std_err},
                {"theta", to_json(r.theta)},
                {"reference", to_json(r.reference)},
                {"seed", r.seed},
                {"redraws", r.redraws}};
}

inline json to_json(const RunsEstimate& e) {
    return json{{"theta_hat", to_json(e.theta_hat)},
                {"exceedances", e.exceedances},
                {"cluster_ends", e.cluster_ends},
                {"orbit_length", e.orbit_length},
                {"q", e.q},
                {"ci_low", e.ci_low},
                {"ci_high", e.ci_high},
                {"block", e.block},
                {"redraws", e.redraws}};
}

/// CSV row for one Monte Carlo point: tau, n, u_n, p_hat, std_err, reference, samples, seed.
inline std::string mc_csv_header() { return "tau,n,u_n,p_hat,std_err,reference,samples,seed"; }

inline std::string mc_csv_row(const ExperimentResult& r) {
    char se[64];
    std::snprintf(se, sizeof se, "%.10g", r.std_err);
    return to_decimal(r.plan.tau, 12) + "," + r.plan.n.get_str() + "," + to_decimal(r.plan.u, 30) + "," +
           to_decimal(r.p_hat, 12) + "," + se + "," + to_decimal(r.reference, 15) + "," + std::to_string(r.samples) +
           "," + std::to_string(r.seed);
}

} // namespace evl
