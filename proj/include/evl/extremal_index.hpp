#pragma once

#include <optional>
#include <vector>

#include "evl/observables.hpp"
#include "evl/tripling.hpp"

namespace evl {

/// rho_j = C r^j.
struct DecayModel {
    Rational C{2};
    Rational r{1, 3};

    void validate() const {
        if (C <= 0) throw BadConfig("decay constant C must be positive");
        if (r <= 0 || r >= 1) throw BadConfig("decay rate r must lie in (0,1)");
    }
    Rational rho(unsigned long j) const {
        Rational p;
        mpz_pow_ui(p.get_num_mpz_t(), r.get_num_mpz_t(), j);
        mpz_pow_ui(p.get_den_mpz_t(), r.get_den_mpz_t(), j);
        p.canonicalize();
        return C * p;
    }
    /// sum_{j >= N} rho_j
    Rational tail(unsigned long N) const { return rho(N) / (1 - r); }
};

struct ThresholdAnalysis {
    LevelPlan plan;
    IntervalUnion U_n;     // resolved parts, plus the tail interval as an outer cover (Example 1)
    IntervalUnion U_tilde; // the set A is built from
    IntervalUnion A_set;
    BoundedValue mu_U;
    BoundedValue mu_U_tilde;
    BoundedValue mu_A;
    BoundedValue theta_n;
    unsigned bv_norm_A = 0;
    BoundedValue discarded_ratio;
    unsigned depth = 0;
};

inline unsigned bv_norm(const IntervalUnion& u) { return static_cast<unsigned>(2 * u.components()); }

inline ThresholdAnalysis analyze_threshold(const ObservableSpec& spec, const SpecialPoints& pts, const LevelPlan& plan,
                                           std::size_t cap = kDefaultIntervalCap) {
    ThresholdAnalysis a;
    a.plan = plan;
    a.depth = pts.config().depth;
    ExceedanceSet U = exceedance_set(spec, pts, plan.u);
    a.U_n = U.cover();
    a.mu_U = U.measure();
    if (spec.kind == ObservableKind::Example1) {
        Truncation t = truncate_exceedance(U, plan.N);
        a.U_tilde = std::move(t.set);
        a.discarded_ratio = t.discarded_ratio;
    } else {
        if (spec.kind == ObservableKind::Example2 && U.cut != static_cast<int>(plan.N))
            throw std::logic_error("plan cut index disagrees with the exceedance set");
        a.U_tilde = U.resolved;
        a.discarded_ratio = BoundedValue(0);
    }
    a.mu_U_tilde = a.U_tilde.measure();
    a.A_set = survivor_set(a.U_tilde, plan.q, cap);
    a.mu_A = a.A_set.measure();
    a.theta_n = a.mu_A / a.mu_U_tilde;
    a.bv_norm_A = bv_norm(a.A_set);
    return a;
}

inline ThresholdAnalysis analyze_threshold(const ObservableSpec& spec, const LevelPlan& plan,
                                           std::size_t cap = kDefaultIntervalCap) {
    PrecisionConfig start = spec.precision;
    if (spec.kind == ObservableKind::Example1) start = start.at_least(plan.N + 2);
    return with_precision(start, [&](const PrecisionConfig& cfg) {
        return analyze_threshold(spec, SpecialPoints(cfg), plan, cap);
    });
}

/// Closed-form extremal index of Example 1,
///   1 - (1/z) (3^-3 (xi_1 - xi_2)/2 + sum_{j>=1} 3^(3^j - 3^(j+1)) (xi_j - xi_{j+2})/2),
/// keeping `terms` terms of the series and adding a rigorous bound for the rest.
inline BoundedValue theta_closed_form_ex1(unsigned terms, const PrecisionConfig& cfg) {
    if (terms < 1) throw BadConfig("theta_closed_form_ex1: terms must be >= 1");
    const PrecisionConfig c = cfg.at_least(terms + 3);
    const SpecialPoints pts(c);
    const Rational half(1, 2);
    BoundedValue s = (pts.xi(1) - pts.xi(2)) * Rational(detail::inv_pow3(3) * half);
    for (unsigned j = 1; j <= terms; ++j) {
        const unsigned long e = detail::pow3_ul(j + 1) - detail::pow3_ul(j);
        s = s + (pts.xi(j) - pts.xi(j + 2)) * Rational(detail::inv_pow3(e) * half);
    }
    // term_j <= (3/4) 3^(-4 3^j); the tail from terms+1 on is below twice its first term, and 1/z < 27
    const Rational dropped = Rational(27) * Rational(3, 2) * detail::inv_pow3(4 * detail::pow3_ul(terms + 1));
    return (BoundedValue(1) - s / pts.z()).widened(dropped);
}

/// Example 2 extremal index sequence in closed form, with J = max{j : 3^j <= N}.
inline BoundedValue theta_n_ex2(const LevelPlan& plan, const SpecialPoints& pts) {
    const BoundedValue eps = exp_neg(plan.u);
    const BoundedValue left = pts.xi(plan.N + 1) + eps;
    Rational sum = 0;
    for (unsigned j = 0; detail::pow3_ul(j) <= plan.N; ++j)
        sum += detail::inv_pow3(detail::pow3_ul(j + 1) - detail::pow3_ul(j));
    const BoundedValue num = left * Rational(1, 3) + eps * Rational(2 * sum);
    const BoundedValue den = left + eps * Rational(2 * (plan.N + 1));
    return BoundedValue(1) - num / den;
}

inline BoundedValue theta_n_ex2(const LevelPlan& plan, const PrecisionConfig& cfg) {
    return with_precision(cfg.at_least(plan.N + 2), [&](const PrecisionConfig& c) {
        return theta_n_ex2(plan, SpecialPoints(c));
    });
}

struct HypothesisRow {
    BigInt n;
    unsigned N = 0;
    BigInt t;
    unsigned bv_norm = 0;
    unsigned bv_bound = 0; // component bound from the example's geometry
    Rational H1;           // bv n C r^t
    Rational H2;           // bv C r^N / (1 - r)
    Rational H1_bound;     // same with bv_bound
    Rational H2_bound;
};

struct HypothesisTable {
    std::vector<HypothesisRow> rows;
    std::optional<std::size_t> onset_H1; // first index from which the sequence strictly decreases
    std::optional<std::size_t> onset_H2;
};

inline unsigned bv_bound_for(ObservableKind kind, unsigned N) {
    switch (kind) {
    case ObservableKind::Example1: return 4 * N + 1;
    case ObservableKind::Example2: return 2 * (2 * N + 3);
    default: return 0;
    }
}

namespace detail {

template <class Get>
std::optional<std::size_t> decreasing_onset(const std::vector<HypothesisRow>& rows, Get get) {
    if (rows.empty()) return std::nullopt;
    std::size_t i = rows.size() - 1;
    while (i > 0 && get(rows[i]) < get(rows[i - 1])) --i;
    if (i + 1 == rows.size() && rows.size() > 1) return std::nullopt;
    return i;
}

} // namespace detail

inline constexpr unsigned long kMaxDecayExponent = 1'000'000;

inline HypothesisTable check_hypotheses(const std::vector<ThresholdAnalysis>& analyses, const DecayModel& decay,
                                        ObservableKind kind) {
    decay.validate();
    HypothesisTable table;
    for (const auto& a : analyses) {
        HypothesisRow row;
        row.n = a.plan.n;
        row.N = a.plan.N;
        row.t = a.plan.t;
        row.bv_norm = a.bv_norm_A;
        row.bv_bound = bv_bound_for(kind, a.plan.N);
        if (!a.plan.t.fits_ulong_p() || a.plan.t.get_ui() > kMaxDecayExponent)
            throw CapExceeded("t_n = " + a.plan.t.get_str() + " too large for an exact decay weight");
        const Rational rt = decay.rho(a.plan.t.get_ui());
        const Rational tail = decay.tail(a.plan.N);
        row.H1 = Rational(row.bv_norm) * Rational(row.n) * rt;
        row.H2 = Rational(row.bv_norm) * tail;
        row.H1_bound = Rational(row.bv_bound) * Rational(row.n) * rt;
        row.H2_bound = Rational(row.bv_bound) * tail;
        table.rows.push_back(std::move(row));
    }
    table.onset_H1 = detail::decreasing_onset(table.rows, [](const HypothesisRow& r) { return r.H1; });
    table.onset_H2 = detail::decreasing_onset(table.rows, [](const HypothesisRow& r) { return r.H2; });
    return table;
}

struct DprimeTerm {
    unsigned j = 0;
    BoundedValue overlap;  // mu(A ∩ f^-j A)
    Rational rhs;          // mu(A)^2 + bv mu(A) rho_j, evaluated at the upper end of mu(A)
    bool within = true;    // overlap <= rhs
};

struct DprimeResult {
    BigInt n;
    unsigned q = 0;
    BigInt k;
    unsigned j_first = 0;
    unsigned j_last = 0;
    BoundedValue mu_A;
    unsigned bv_norm_A = 0;
    BoundedValue value; // n sum_j mu(A ∩ f^-j A)
    std::vector<DprimeTerm> terms;
    std::size_t violations = 0;
};

/// n sum_{j=q+1}^{floor(n/k)-1} mu(A ∩ f^-j A) for an explicit set A.
inline DprimeResult dprime_sum(const IntervalUnion& A, const BigInt& n, unsigned q, const BigInt& k,
                               const DecayModel& decay = {}, std::size_t cap = kDefaultIntervalCap) {
    if (k < 1) throw BadConfig("dprime_sum: k must be positive");
    DprimeResult res;
    res.n = n;
    res.q = q;
    res.k = k;
    res.mu_A = A.measure();
    res.bv_norm_A = bv_norm(A);
    res.value = BoundedValue(0);
    BigInt last = n / k - 1;
    res.j_first = q + 1;
    if (last < res.j_first) {
        res.j_last = q;
        return res;
    }
    const BigInt count = last - res.j_first + 1;
    if (count * BigInt(static_cast<unsigned long>(std::max<std::size_t>(A.size(), 1))) >
        BigInt(static_cast<unsigned long>(cap)))
        throw CapExceeded("dprime_sum: " + count.get_str() + " lags exceed the work cap");
    res.j_last = static_cast<unsigned>(last.get_ui());
    const Rational muA = res.mu_A.upper();
    BoundedValue sum(0);
    for (unsigned j = res.j_first; j <= res.j_last; ++j) {
        DprimeTerm t;
        t.j = j;
        t.overlap = return_measure(A, A, j);
        t.rhs = muA * muA + Rational(res.bv_norm_A) * muA * decay.rho(j);
        t.within = t.overlap.lower() <= t.rhs;
        if (!t.within) ++res.violations;
        sum = sum + t.overlap;
        res.terms.push_back(std::move(t));
    }
    res.value = sum * Rational(n);
    return res;
}

inline DprimeResult dprime_sum(const ObservableSpec& spec, const LevelPlan& plan, const DecayModel& decay = {},
                               std::size_t cap = kDefaultIntervalCap) {
    const ThresholdAnalysis a = analyze_threshold(spec, plan, cap);
    return dprime_sum(a.A_set, plan.n, plan.q, plan.k, decay, cap);
}

} // namespace evl
