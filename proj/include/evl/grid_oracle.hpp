#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "evl/ternary_orbit.hpp"
#include "evl/tripling.hpp"

// Brute-force reference for the set algebra: unions with endpoints k/3^D, probed at the
// midpoints (2m+1)/(2 3^D) of the ternary grid, whose orbits are followed in integers.

namespace evl {

struct GridPart {
    std::uint64_t lo = 0; // endpoint lo / 3^D
    std::uint64_t hi = 0;
    bool lo_closed = true;
    bool hi_closed = false;
};

struct GridUnion {
    unsigned digits = 1;
    std::vector<GridPart> parts;

    std::uint64_t cells() const { return static_cast<std::uint64_t>(pow3_u128(digits)); }

    IntervalUnion to_union() const {
        std::vector<Interval> raw;
        const BigInt den = detail::pow_ui(3, digits);
        for (const auto& p : parts)
            raw.push_back({BoundedValue(Rational(BigInt(static_cast<unsigned long>(p.lo)), den)),
                           BoundedValue(Rational(BigInt(static_cast<unsigned long>(p.hi)), den)), p.lo_closed,
                           p.hi_closed});
        return IntervalUnion::normalize(std::move(raw));
    }

    /// Membership of a / (2 3^D) for odd a; such points never sit on an endpoint.
    bool contains_odd(std::uint64_t a) const {
        for (const auto& p : parts)
            if (2 * p.lo < a && a < 2 * p.hi) return true;
        return false;
    }
};

inline GridUnion random_grid_union(unsigned digits, std::uint64_t seed, std::uint64_t index) {
    GridUnion g;
    g.digits = digits;
    const std::uint64_t top = g.cells(); // endpoints range over 0..3^D
    std::uint64_t ctr = 0;
    auto next = [&] { return counter_word(seed, (static_cast<std::uint64_t>(digits) << 32) | index, ctr++, 0); };
    const std::uint64_t max_parts = std::min<std::uint64_t>(4, (top + 1) / 2);
    const std::uint64_t count = 1 + next() % max_parts;
    std::set<std::uint64_t> ends;
    while (ends.size() < 2 * count) ends.insert(next() % (top + 1));
    std::vector<std::uint64_t> e(ends.begin(), ends.end());
    for (std::size_t i = 0; i + 1 < e.size(); i += 2) {
        const std::uint64_t bits = next();
        g.parts.push_back({e[i], e[i + 1], (bits & 1) != 0, (bits & 2) != 0});
    }
    if (g.parts.back().hi == top) g.parts.back().hi_closed = false;
    return g;
}

struct OracleReport {
    std::uint64_t sets = 0;
    std::uint64_t checks = 0;
    std::uint64_t mismatches = 0;
    std::vector<std::string> first_mismatches;
};

namespace detail {

// in[i] = whether f^i of the grid point a/(2 3^D) lies in g, for i = 0..steps-1
inline void orbit_hits(const GridUnion& g, std::uint64_t a, unsigned steps, std::vector<char>& in) {
    const std::uint64_t mod = 2 * g.cells();
    in.assign(steps, 0);
    for (unsigned i = 0; i < steps; ++i) {
        in[i] = g.contains_odd(a) ? 1 : 0;
        a = (3 * a) % mod;
    }
}

inline void note_mismatch(OracleReport& r, const std::string& what) {
    ++r.mismatches;
    if (r.first_mismatches.size() < 10) r.first_mismatches.push_back(what);
}

} // namespace detail

/// survivor_set(U, q) against orbit iteration for q = 0..max_q.
inline OracleReport survivor_oracle(unsigned max_digits, unsigned max_q, unsigned sets_per_size, std::uint64_t seed,
                                    std::size_t cap = kDefaultIntervalCap) {
    OracleReport rep;
    std::vector<char> in;
    for (unsigned D = 1; D <= max_digits; ++D)
        for (unsigned s = 0; s < sets_per_size; ++s) {
            const GridUnion g = random_grid_union(D, seed, s);
            const IntervalUnion U = g.to_union();
            ++rep.sets;
            std::vector<IntervalUnion> A;
            for (unsigned q = 0; q <= max_q; ++q) A.push_back(survivor_set(U, q, cap));
            const std::uint64_t mod = 2 * g.cells();
            for (std::uint64_t m = 0; m < g.cells(); ++m) {
                const std::uint64_t a = 2 * m + 1;
                detail::orbit_hits(g, a, max_q + 1, in);
                const Rational x(BigInt(static_cast<unsigned long>(a)), BigInt(static_cast<unsigned long>(mod)));
                bool clear = true; // no return among 1..q
                for (unsigned q = 0; q <= max_q; ++q) {
                    if (q > 0 && in[q]) clear = false;
                    const bool expect = in[0] && clear;
                    const auto got = A[q].contains(x);
                    ++rep.checks;
                    if (!got || *got != expect)
                        detail::note_mismatch(rep, "D=" + std::to_string(D) + " set=" + std::to_string(s) +
                                                       " q=" + std::to_string(q) + " x=" + x.get_str());
                }
            }
        }
    return rep;
}

/// W_{0,n}(U) against "the first n orbit points avoid U" for n = 1..max_window.
inline OracleReport window_oracle(unsigned max_digits, unsigned max_window, unsigned sets_per_size, std::uint64_t seed,
                                  std::size_t cap = kDefaultIntervalCap) {
    OracleReport rep;
    std::vector<char> in;
    for (unsigned D = 1; D <= max_digits; ++D)
        for (unsigned s = 0; s < sets_per_size; ++s) {
            const GridUnion g = random_grid_union(D, seed, s);
            const IntervalUnion U = g.to_union();
            ++rep.sets;
            std::vector<IntervalUnion> W;
            for (unsigned n = 1; n <= max_window; ++n) W.push_back(avoid_window(U, 0, n, cap));
            const std::uint64_t mod = 2 * g.cells();
            for (std::uint64_t m = 0; m < g.cells(); ++m) {
                const std::uint64_t a = 2 * m + 1;
                detail::orbit_hits(g, a, max_window, in);
                const Rational x(BigInt(static_cast<unsigned long>(a)), BigInt(static_cast<unsigned long>(mod)));
                bool avoided = true;
                for (unsigned n = 1; n <= max_window; ++n) {
                    if (in[n - 1]) avoided = false;
                    const auto got = W[n - 1].contains(x);
                    ++rep.checks;
                    if (!got || *got != avoided)
                        detail::note_mismatch(rep, "D=" + std::to_string(D) + " set=" + std::to_string(s) +
                                                       " n=" + std::to_string(n) + " x=" + x.get_str());
                }
            }
        }
    return rep;
}

} // namespace evl
