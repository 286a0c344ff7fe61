#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "evl/interval_union.hpp"

// Set operations driven by the tripling map f(x) = 3x mod 1 on [0,1).

namespace evl {

inline constexpr std::size_t kDefaultIntervalCap = 2'000'000;

namespace detail {

inline BigInt pow3(unsigned i) { return pow_ui(3, i); }

// Pieces (B + k) / 3^i for k in [k_lo, k_hi], merged across branch boundaries.
inline std::vector<Interval> branch_pieces(const IntervalUnion& b, unsigned i, const BigInt& k_lo, const BigInt& k_hi) {
    std::vector<Interval> out;
    if (b.empty() || k_hi < k_lo) return out;
    const Rational scale(BigInt(1), pow3(i));
    for (BigInt k = k_lo; k <= k_hi; ++k) {
        const Rational shift(k);
        for (const auto& iv : b.parts()) {
            Interval piece{(iv.lo + BoundedValue(shift)) * scale, (iv.hi + BoundedValue(shift)) * scale, iv.lo_closed,
                           iv.hi_closed};
            append_merging(out, std::move(piece));
        }
    }
    return out;
}

inline void check_cap(const BigInt& pieces, std::size_t cap, const char* what) {
    if (pieces > BigInt(static_cast<unsigned long>(cap)))
        throw CapExceeded(std::string(what) + ": " + pieces.get_str() + " parts exceed the cap of " +
                          std::to_string(cap));
}

} // namespace detail

/// f^-i(U) = union over k of (U + k) / 3^i.
inline IntervalUnion preimage(const IntervalUnion& u, unsigned i, std::size_t cap = kDefaultIntervalCap) {
    if (i == 0 || u.empty()) return u;
    const BigInt branches = detail::pow3(i);
    detail::check_cap(branches * BigInt(static_cast<unsigned long>(u.size())), cap, "preimage");
    return IntervalUnion::from_sorted(detail::branch_pieces(u, i, BigInt(0), BigInt(branches - 1)));
}

/// a intersected with f^-i(b), generating only the branches of f^i that meet a.
inline IntervalUnion intersect_preimage(const IntervalUnion& a, const IntervalUnion& b, unsigned i,
                                        std::size_t cap = kDefaultIntervalCap) {
    if (i == 0) return intersect(a, b);
    if (a.empty() || b.empty()) return {};
    const BigInt branches = detail::pow3(i);
    const Rational scale(branches);
    std::vector<Interval> out;
    BigInt generated = 0;
    for (const auto& part : a.parts()) {
        BigInt k_lo = detail::floor(part.lo.lower() * scale);
        BigInt k_hi = detail::floor(part.hi.upper() * scale);
        if (k_lo < 0) k_lo = 0;
        if (k_hi > branches - 1) k_hi = branches - 1;
        if (k_hi < k_lo) continue;
        generated += (k_hi - k_lo + 1) * BigInt(static_cast<unsigned long>(b.size()));
        detail::check_cap(generated, cap, "intersect_preimage");
        IntervalUnion local = IntervalUnion::from_sorted(detail::branch_pieces(b, i, k_lo, k_hi));
        IntervalUnion single = IntervalUnion::from_sorted({part});
        const IntervalUnion hit = intersect(single, local);
        for (const auto& iv : hit.parts()) out.push_back(iv);
    }
    return IntervalUnion::from_sorted(std::move(out));
}

/// A_q(U) = U minus the points whose orbit re-enters U within q steps.
inline IntervalUnion survivor_set(const IntervalUnion& u, unsigned q, std::size_t cap = kDefaultIntervalCap) {
    IntervalUnion a = u;
    if (q == 0 || u.empty()) return a;
    const IntervalUnion uc = complement(u);
    for (unsigned i = 1; i <= q && !a.empty(); ++i) a = intersect_preimage(a, uc, i, cap);
    return a;
}

/// W_{s,l}(B): points whose orbit avoids B at every time i = s .. s + max(l-1, 0).
inline IntervalUnion avoid_window(const IntervalUnion& b, unsigned s, unsigned l, std::size_t cap = kDefaultIntervalCap) {
    const IntervalUnion bc = complement(b);
    const unsigned last = s + (l > 0 ? l - 1 : 0);
    IntervalUnion w = preimage(bc, s, cap);
    for (unsigned i = s + 1; i <= last && !w.empty(); ++i) w = intersect_preimage(w, bc, i, cap);
    return w;
}

/// Lebesgue measure of a intersected with f^-j(b), by counting full branches of f^j over each
/// part of a. Never materialises the preimage, so j is not limited by the interval cap.
inline BoundedValue return_measure(const IntervalUnion& a, const IntervalUnion& b, unsigned j) {
    if (a.empty() || b.empty()) return BoundedValue(0);
    const BigInt branches = detail::pow3(j);
    const Rational scale(branches);
    const BoundedValue mu_b = b.measure();
    const BoundedValue zero(0), one(1);
    auto split = [&](const BoundedValue& x) {
        BoundedValue m = x * scale;
        BigInt k = detail::floor(m.lower());
        if (detail::floor(m.upper()) != k) {
            // the upper end may sit exactly on the integer k+1 when m is exact
            if (!(m.is_exact()))
                throw PrecisionExhausted("branch index of an endpoint is undecidable at j=" + std::to_string(j));
        }
        return std::pair<BigInt, BoundedValue>{k, m - BoundedValue(Rational(k))};
    };
    BoundedValue total(0);
    for (const auto& part : a.parts()) {
        auto [ka, fa] = split(part.lo);
        auto [kb, fb] = split(part.hi);
        if (ka == kb) {
            total = total + measure_within(b, fa, fb);
        } else {
            total = total + measure_within(b, fa, one) + mu_b * Rational(BigInt(kb - ka - 1)) +
                    measure_within(b, zero, fb);
        }
    }
    return clamp_nonnegative(total * Rational(BigInt(1), branches));
}

} // namespace evl
