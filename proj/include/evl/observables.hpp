#pragma once

#include <optional>
#include <string>
#include <vector>

#include "evl/interval_union.hpp"
#include "evl/special_points.hpp"
#include "evl/transcendental.hpp"

namespace evl {

enum class ObservableKind { Example1, Example2, Generic };

inline const char* to_string(ObservableKind k) {
    switch (k) {
    case ObservableKind::Example1: return "ex1";
    case ObservableKind::Example2: return "ex2";
    case ObservableKind::Generic: return "generic";
    }
    return "?";
}

/// Single-centre observable phi(x) = h(|x - centre|).
///   h_type 1: h(d) = -g log d          (param = g)
///   h_type 2: h(d) = d^(-1/beta)       (param = beta)
///   h_type 3: h(d) = D - d^(1/gamma)   (param = gamma, top = D)
struct GenericObservable {
    int h_type = 1;
    Rational param = 1;
    Rational top = 1;
    Rational centre = 0;
    unsigned q = 1;

    void validate() const {
        if (h_type < 1 || h_type > 3) throw BadConfig("generic observable: h_type must be 1, 2 or 3");
        if (param <= 0) throw BadConfig("generic observable: g, beta and gamma must be positive");
        if (centre < 0 || centre >= 1) throw BadConfig("generic observable: centre must lie in [0,1)");
    }
};

struct ObservableSpec {
    ObservableKind kind = ObservableKind::Example1;
    PrecisionConfig precision{};
    GenericObservable generic{};

    static ObservableSpec example1(PrecisionConfig p = {}) { return {ObservableKind::Example1, p, {}}; }
    static ObservableSpec example2(PrecisionConfig p = {}) { return {ObservableKind::Example2, p, {}}; }
    static ObservableSpec generic_at(GenericObservable g, PrecisionConfig p = {}) {
        g.validate();
        return {ObservableKind::Generic, p, std::move(g)};
    }
    ObservableSpec with_precision(PrecisionConfig p) const {
        ObservableSpec s = *this;
        s.precision = p;
        return s;
    }
};

/// One connected piece of an exceedance set. `index` is j for the piece around xi_j (z for
/// j = 0). Example 2's leftmost interval carries index N+1; a generic ball carries 0.
struct ExceedancePart {
    int index = 0;
    Interval part;
};

struct ExceedanceSet {
    BoundedValue level;
    std::vector<ExceedancePart> parts; // ascending, pairwise disjoint
    IntervalUnion resolved;            // union of `parts`
    // Example 1 only: [0, bound) holds every I_{j,u} beyond the resolved ones and the atom {0}.
    std::optional<Interval> tail;
    BoundedValue tail_measure{0};
    int cut = -1;                      // Example 1: last resolved j; Example 2: N
    BoundedValue radius{0};            // Example 2 and generic: e^-u resp. h^-1(u)

    BoundedValue measure() const { return resolved.measure() + tail_measure; }

    /// resolved parts plus the whole tail interval; an outer cover of the set.
    IntervalUnion cover() const {
        if (!tail) return resolved;
        return unite(resolved, IntervalUnion::from_sorted({*tail}));
    }
};

namespace detail {

// Example 1: the tent on I_j rises from mid_j = (xi_{j+1}+xi_j)/2 to xi_j and falls back to
// mid_{j-1}; half_j = (xi_j - xi_{j+1})/2.
struct TentGrid {
    std::vector<BoundedValue> mid;  // mid[j], j = 0..K-2
    std::vector<BoundedValue> half; // half[j]
};

inline TentGrid tent_grid(const SpecialPoints& pts) {
    TentGrid g;
    const Rational one_half(1, 2);
    for (unsigned j = 0; j + 1 < pts.available(); ++j) {
        g.mid.push_back((pts.xi(j) + pts.xi(j + 1)) * one_half);
        g.half.push_back((pts.xi(j) - pts.xi(j + 1)) * one_half);
    }
    return g;
}

// max{ j >= 0 : xi_j - xi_{j+1} >= 2 eps }, using that the gaps decrease in j.
inline int ex2_cut(const SpecialPoints& pts, const BoundedValue& eps) {
    const BoundedValue two_eps = eps * Rational(2);
    for (unsigned j = 0;; ++j) {
        if (j + 1 >= pts.available())
            throw PrecisionExhausted("cut index needs xi_" + std::to_string(j + 1) + " at depth " +
                                     std::to_string(pts.config().depth));
        Ordering o = compare(pts.xi(j) - pts.xi(j + 1), two_eps);
        if (o == Ordering::Inconclusive) throw PrecisionExhausted("gap comparison at xi_" + std::to_string(j));
        if (o == Ordering::Less) return static_cast<int>(j) - 1;
    }
}

inline BoundedValue generic_radius(const GenericObservable& g, const BoundedValue& u) {
    switch (g.h_type) {
    case 1: return exp_neg(u * Rational(1 / g.param));
    case 2:
        if (u.lower() <= 0) throw LevelOutOfRange("type-2 level must be positive");
        return pow_of(u, Rational(-g.param));
    default: {
        BoundedValue gap = BoundedValue(g.top) - u;
        if (gap.upper() <= 0) throw LevelOutOfRange("type-3 level must be below D");
        if (gap.lower() <= 0) throw PrecisionExhausted("type-3 level indistinguishable from D");
        return pow_of(gap, g.param);
    }
    }
}

inline Interval clipped_ball(const Rational& centre, const BoundedValue& eps) {
    BoundedValue c(centre);
    BoundedValue lo = c - eps, hi = c + eps;
    Interval iv{lo, hi, false, false};
    if (lo.upper() <= 0) {
        iv.lo = BoundedValue(0);
        iv.lo_closed = true;
    } else if (lo.lower() < 0) {
        throw PrecisionExhausted("ball edge indistinguishable from 0");
    }
    if (hi.lower() >= 1) {
        iv.hi = BoundedValue(1);
    } else if (hi.upper() > 1) {
        throw PrecisionExhausted("ball edge indistinguishable from 1");
    }
    return iv;
}

inline ExceedanceSet finish(ExceedanceSet s) {
    std::vector<Interval> raw;
    raw.reserve(s.parts.size());
    for (const auto& p : s.parts) raw.push_back(p.part);
    s.resolved = IntervalUnion::from_sorted(std::move(raw));
    return s;
}

inline ExceedanceSet ex1_exceedance(const SpecialPoints& pts, const BoundedValue& u) {
    if (compare(u, BoundedValue(1)) != Ordering::Less) throw LevelOutOfRange("Example 1 levels must be below 1");
    ExceedanceSet s;
    s.level = u;
    if (u.upper() < 0) {
        s.parts.push_back({-1, Interval::closed_open(BoundedValue(0), BoundedValue(1))});
        return finish(std::move(s));
    }
    if (u.lower() < 0) throw PrecisionExhausted("Example 1 level straddles 0");
    if (pts.available() < 2) throw PrecisionExhausted("Example 1 needs xi_1");
    const TentGrid g = tent_grid(pts);
    const int last = static_cast<int>(g.mid.size()) - 1; // I_j needs xi_{j+1}
    s.cut = last;
    for (int j = last; j >= 0; --j) {
        Interval iv;
        iv.lo = g.mid[j] + g.half[j] * u;
        iv.lo_closed = false;
        if (j == 0) {
            iv.hi = pts.z();
            iv.hi_closed = true;
        } else {
            iv.hi = g.mid[j - 1] - g.half[j - 1] * u;
            iv.hi_closed = false;
        }
        s.parts.push_back({j, std::move(iv)});
    }
    s.tail = Interval::closed_open(BoundedValue(0), g.mid[last]);
    s.tail_measure = clamp_nonnegative((BoundedValue(1) - u) * g.mid[last]);
    return finish(std::move(s));
}

inline ExceedanceSet ex2_exceedance(const SpecialPoints& pts, const BoundedValue& u) {
    const BoundedValue eps = exp_neg(u);
    const int N = ex2_cut(pts, eps);
    if (N < 0) throw LevelOutOfRange("Example 2 level too low: the ball around z swallows xi_1");
    ExceedanceSet s;
    s.level = u;
    s.radius = eps;
    s.cut = N;
    s.parts.push_back({N + 1, Interval::closed_open(BoundedValue(0), pts.xi(N + 1) + eps)});
    for (int j = N; j >= 0; --j)
        s.parts.push_back({j, Interval::open(pts.xi(j) - eps, pts.xi(j) + eps)});
    return finish(std::move(s));
}

} // namespace detail

/// U(u) = {phi > u} using the special points of `pts` (which fix the working depth).
inline ExceedanceSet exceedance_set(const ObservableSpec& spec, const SpecialPoints& pts, const BoundedValue& u) {
    switch (spec.kind) {
    case ObservableKind::Example1: return detail::ex1_exceedance(pts, u);
    case ObservableKind::Example2: return detail::ex2_exceedance(pts, u);
    case ObservableKind::Generic: {
        ExceedanceSet s;
        s.level = u;
        s.radius = detail::generic_radius(spec.generic, u);
        s.parts.push_back({0, detail::clipped_ball(spec.generic.centre, s.radius)});
        return detail::finish(std::move(s));
    }
    }
    throw BadConfig("unknown observable");
}

inline ExceedanceSet exceedance_set(const ObservableSpec& spec, const BoundedValue& u) {
    if (spec.kind == ObservableKind::Generic) return exceedance_set(spec, SpecialPoints(PrecisionConfig{1, 1}), u);
    return with_precision(spec.precision, [&](const PrecisionConfig& cfg) {
        return exceedance_set(spec, SpecialPoints(cfg), u);
    });
}

/// Measure of U(u) from the closed forms, without building the set.
inline BoundedValue exceedance_measure(const ObservableSpec& spec, const SpecialPoints& pts, const BoundedValue& u) {
    switch (spec.kind) {
    case ObservableKind::Example1:
        if (compare(u, BoundedValue(1)) != Ordering::Less) throw LevelOutOfRange("Example 1 levels must be below 1");
        if (u.upper() < 0) return BoundedValue(1);
        return clamp_nonnegative((BoundedValue(1) - u) * pts.z());
    case ObservableKind::Example2: {
        const BoundedValue eps = exp_neg(u);
        const int N = detail::ex2_cut(pts, eps);
        if (N < 0) throw LevelOutOfRange("Example 2 level too low: the ball around z swallows xi_1");
        return pts.xi(N + 1) + eps * Rational(2 * N + 3);
    }
    case ObservableKind::Generic: return exceedance_set(spec, pts, u).measure();
    }
    throw BadConfig("unknown observable");
}

struct Truncation {
    IntervalUnion set;
    BoundedValue discarded_ratio;
};

/// Keeps the parts indexed 0..N and reports measure(U \ kept) / measure(U).
inline Truncation truncate_exceedance(const ExceedanceSet& u, unsigned N) {
    if (u.tail && static_cast<int>(N) > u.cut)
        throw PrecisionExhausted("truncation index " + std::to_string(N) + " beyond the resolved components");
    std::vector<Interval> kept;
    for (const auto& p : u.parts)
        if (p.index >= 0 && p.index <= static_cast<int>(N)) kept.push_back(p.part);
    Truncation t{IntervalUnion::from_sorted(std::move(kept)), BoundedValue(0)};
    const BoundedValue total = u.measure();
    const BoundedValue dropped = clamp_nonnegative(total - t.set.measure());
    if (dropped.upper() > 0) t.discarded_ratio = clamp_nonnegative(dropped / total);
    return t;
}

/// phi(x) for an exact rational x in [0,1).
inline BoundedValue eval(const ObservableSpec& spec, const SpecialPoints& pts, const Rational& x) {
    if (x < 0 || x >= 1) throw std::invalid_argument("eval: x outside [0,1)");
    const BoundedValue p(x);
    switch (spec.kind) {
    case ObservableKind::Example1: {
        if (x == 0) return BoundedValue(1);
        const auto g = detail::tent_grid(pts);
        const int last = static_cast<int>(g.mid.size()) - 1;
        if (last < 0 || compare(p, g.mid[last]) != Ordering::Greater)
            throw PrecisionExhausted("x lies below the resolved tents");
        if (compare(p, pts.z()) == Ordering::Greater) return BoundedValue(0);
        for (int j = 0; j <= last; ++j) {
            if (compare(p, g.mid[j]) != Ordering::Greater) continue;
            // rising flank [mid_j, xi_j], falling flank [xi_j, mid_{j-1}]
            const BoundedValue& xj = pts.xi(static_cast<unsigned>(j));
            Ordering o = compare(p, xj);
            if (o == Ordering::Inconclusive) throw PrecisionExhausted("x too close to a maximum point");
            if (o != Ordering::Greater) return (p - g.mid[j]) / g.half[j];
            return (g.mid[j - 1] - p) / g.half[j - 1];
        }
        throw PrecisionExhausted("x lies below the resolved tents");
    }
    case ObservableKind::Example2: {
        if (x == 0) throw Undefined("phi is infinite on the maximal set");
        const BoundedValue& deepest = pts.xi(pts.available() - 1);
        if (compare(p, deepest) != Ordering::Greater)
            throw PrecisionExhausted("x lies below the deepest resolved point");
        BoundedValue d = p;
        for (unsigned j = 0; j < pts.available(); ++j) {
            BoundedValue dj = p - pts.xi(j);
            if (dj.lower() < 0) dj = -dj;
            if (dj.lower() < 0) throw PrecisionExhausted("x too close to a maximum point");
            d = enclosure_min(d, dj);
        }
        return -log_of(d);
    }
    case ObservableKind::Generic: {
        const auto& g = spec.generic;
        BoundedValue d(x > g.centre ? Rational(x - g.centre) : Rational(g.centre - x));
        if (d.upper() == 0) throw Undefined("phi is evaluated at its centre");
        switch (g.h_type) {
        case 1: return -(log_of(d) * g.param);
        case 2: return pow_of(d, Rational(-1 / g.param));
        default: return BoundedValue(g.top) - pow_of(d, Rational(1 / g.param));
        }
    }
    }
    throw BadConfig("unknown observable");
}

inline BoundedValue eval(const ObservableSpec& spec, const Rational& x) {
    return with_precision(spec.precision, [&](const PrecisionConfig& cfg) { return eval(spec, SpecialPoints(cfg), x); });
}

/// Example 1 cut index: the least N >= 1 with n <= 3^(3^(N-1)), i.e. ceil(log3(log3 n) + 1).
inline unsigned ex1_cut_index(const BigInt& n) {
    if (n < 2) throw std::invalid_argument("ex1_cut_index: n must be >= 2");
    unsigned N = 1;
    BigInt bound = 3; // 3^(3^(N-1))
    while (n > bound) {
        bound = bound * bound * bound;
        ++N;
    }
    return N;
}

struct LevelPlan {
    BigInt n;
    Rational tau;
    BoundedValue u;
    BoundedValue mu; // measure of U(u)
    unsigned N = 0;
    unsigned q = 0;
    BigInt t;
    BigInt k;
};

namespace detail {

inline BigInt isqrt(const BigInt& n) {
    BigInt r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    return r;
}

inline void fill_sequences(LevelPlan& plan) {
    BigInt s = isqrt(plan.n);
    plan.t = (s * s == plan.n) ? s : BigInt(s + 1);
    plan.k = isqrt(s); // floor(n^(1/4)) = isqrt(isqrt(n))
}

inline unsigned cut_index(const ObservableSpec& spec, const SpecialPoints& pts, const LevelPlan& plan) {
    switch (spec.kind) {
    case ObservableKind::Example1: return ex1_cut_index(plan.n);
    case ObservableKind::Example2: return static_cast<unsigned>(ex2_cut(pts, exp_neg(plan.u)));
    case ObservableKind::Generic: return spec.generic.q;
    }
    return 0;
}

} // namespace detail

inline const Rational& default_level_tolerance() {
    static const Rational tol(1, 1'000'000'000);
    return tol;
}

/// u_n with |n measure(U(u_n)) - tau| <= tol * tau, by bisection on exact rational u.
inline LevelPlan level_for_tau(const ObservableSpec& spec, const SpecialPoints& pts, const BigInt& n,
                               const Rational& tau, const Rational& tol = default_level_tolerance()) {
    if (n < 2) throw BadConfig("level_for_tau: n must be >= 2");
    if (tau <= 0) throw BadConfig("level_for_tau: tau must be positive");
    const Rational nq(n);
    auto scaled = [&](const Rational& u) { return exceedance_measure(spec, pts, BoundedValue(u)) * nq; };

    Rational a, b;
    switch (spec.kind) {
    case ObservableKind::Example1:
        a = 0;
        b = 1;
        break;
    case ObservableKind::Example2: {
        // lowest level at which the ball around z stays clear of xi_1
        BoundedValue half_gap = (pts.z() - pts.xi(1)) * Rational(1, 2);
        a = (-log_of(half_gap)).upper();
        a = Rational(detail::ceil(a * 1024), 1024);
        b = a + 1;
        break;
    }
    case ObservableKind::Generic:
        switch (spec.generic.h_type) {
        case 1: a = 0; break;
        case 2: a = 1; break;
        default: a = spec.generic.top - 1; break;
        }
        b = spec.generic.h_type == 3 ? Rational((a + spec.generic.top) / 2) : Rational(a + 1);
        break;
    }
    a.canonicalize();
    b.canonicalize();
    if (scaled(a).upper() < tau * (1 - tol))
        throw NoSolution("tau/n = " + to_decimal(Rational(tau / nq), 6) + " exceeds the attainable exceedance measure");
    if (spec.kind != ObservableKind::Example1) {
        int guard = 0;
        while (!(scaled(b).upper() < tau)) {
            if (++guard > 4000) throw NoSolution("could not bracket the level");
            if (spec.generic.h_type == 3 && spec.kind == ObservableKind::Generic)
                b = (b + spec.generic.top) / 2;
            else
                b = a + (b - a) * 2;
            b.canonicalize();
        }
    }

    const Rational lo_target = tau * (1 - tol), hi_target = tau * (1 + tol);
    Rational u;
    for (int iter = 0;; ++iter) {
        if (iter > 20000) throw PrecisionExhausted("level bisection did not converge");
        u = (a + b) / 2;
        u.canonicalize();
        BoundedValue v = scaled(u);
        if (v.inside(lo_target, hi_target)) break;
        if (v.lower() > tau) {
            a = u;
        } else if (v.upper() < tau) {
            b = u;
        } else {
            throw PrecisionExhausted("exceedance measure too coarse to resolve the level");
        }
    }

    LevelPlan plan;
    plan.n = n;
    plan.tau = tau;
    plan.u = BoundedValue(u);
    plan.mu = exceedance_measure(spec, pts, plan.u);
    plan.N = detail::cut_index(spec, pts, plan);
    plan.q = plan.N;
    detail::fill_sequences(plan);

    if (spec.kind == ObservableKind::Example1) {
        // closed form u = 1 - tau / (n z) must agree with the bisection
        BoundedValue closed = BoundedValue(1) - BoundedValue(Rational(tau / nq)) / pts.z();
        Rational slack = tol * tau / (nq * pts.z().lower()) * 2 + closed.radius();
        if (detail::abs(Rational(u - closed.value())) > slack)
            throw std::logic_error("Example 1 level: bisection and closed form disagree");
    }
    return plan;
}

inline LevelPlan level_for_tau(const ObservableSpec& spec, const BigInt& n, const Rational& tau,
                               const Rational& tol = default_level_tolerance()) {
    return with_precision(spec.precision, [&](const PrecisionConfig& cfg) {
        return level_for_tau(spec, SpecialPoints(cfg), n, tau, tol);
    });
}

/// Plan at a prescribed level: n = round(1 / measure(U(u))), tau = n measure(U(u)).
inline LevelPlan plan_at_level(const ObservableSpec& spec, const SpecialPoints& pts, const Rational& u) {
    LevelPlan plan;
    plan.u = BoundedValue(u);
    plan.mu = exceedance_measure(spec, pts, plan.u);
    if (plan.mu.lower() <= 0) throw PrecisionExhausted("exceedance measure not separated from 0");
    Rational inv = Rational(1) / plan.mu.value();
    plan.n = detail::floor(inv + Rational(1, 2));
    if (plan.n < 2) throw LevelOutOfRange("level too low for a plan with n >= 2");
    plan.tau = plan.mu.value() * Rational(plan.n);
    plan.tau.canonicalize();
    plan.N = detail::cut_index(spec, pts, plan);
    plan.q = plan.N;
    detail::fill_sequences(plan);
    return plan;
}

inline LevelPlan plan_at_level(const ObservableSpec& spec, const Rational& u) {
    return with_precision(spec.precision, [&](const PrecisionConfig& cfg) {
        return plan_at_level(spec, SpecialPoints(cfg), u);
    });
}

} // namespace evl
