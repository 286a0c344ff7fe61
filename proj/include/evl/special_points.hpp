#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "evl/bounded_value.hpp"

namespace evl {

struct PrecisionConfig {
    unsigned depth = 5;      // K: retained terms of the lacunary series
    unsigned max_depth = 12; // retry ceiling

    void validate() const {
        if (depth < 1 || depth > max_depth)
            throw BadConfig("precision requires 1 <= depth <= max_depth (depth=" + std::to_string(depth) +
                            ", max_depth=" + std::to_string(max_depth) + ")");
    }

    PrecisionConfig at_least(unsigned k) const {
        PrecisionConfig c = *this;
        c.depth = std::max(depth, k);
        if (c.depth > c.max_depth) throw PrecisionExhausted("required depth " + std::to_string(k) + " exceeds max_depth");
        return c;
    }
};

namespace detail {

inline unsigned long pow3_ul(unsigned e) {
    unsigned long r = 1;
    for (unsigned i = 0; i < e; ++i) r *= 3;
    return r;
}

// (3/2) * 3^-(3^(K+1)) * 3^(3^j): majorant of the dropped tail sum_{i>K} 3^(3^j - 3^i).
inline Rational lacunary_tail(unsigned j, unsigned K) {
    return Rational(3, 2) * inv_pow3(pow3_ul(K + 1) - (j == 0 ? 0 : pow3_ul(j)));
}

} // namespace detail

/// z = sum_{i>=1} 3^-(3^i), truncated after K terms.
inline BoundedValue z_point(const PrecisionConfig& cfg) {
    cfg.validate();
    Rational v = 0;
    for (unsigned i = 1; i <= cfg.depth; ++i) v += detail::inv_pow3(detail::pow3_ul(i));
    return BoundedValue(v, detail::lacunary_tail(0, cfg.depth));
}

/// xi_j = f^(3^j)(z) = sum_{i>j} 3^(3^j - 3^i). j = 0 is z itself.
inline BoundedValue xi_point(unsigned j, const PrecisionConfig& cfg) {
    cfg.validate();
    if (j == 0) return z_point(cfg);
    if (cfg.depth <= j)
        throw PrecisionExhausted("xi_" + std::to_string(j) + " needs depth > " + std::to_string(j) + " (depth=" +
                                 std::to_string(cfg.depth) + ")");
    const unsigned long shift = detail::pow3_ul(j);
    Rational v = 0;
    for (unsigned i = j + 1; i <= cfg.depth; ++i) v += detail::inv_pow3(detail::pow3_ul(i) - shift);
    return BoundedValue(v, detail::lacunary_tail(j, cfg.depth));
}

/// Lower/upper brackets 3^(-2*3^j) <= xi_j <= 3^(-2*3^j) + (9/8) 3^(-8*3^j).
inline std::pair<Rational, Rational> xi_reference_bracket(unsigned j) {
    Rational lo = detail::inv_pow3(2 * detail::pow3_ul(j));
    Rational hi = lo + Rational(9, 8) * detail::inv_pow3(8 * detail::pow3_ul(j));
    return {lo, hi};
}

/// The maximal set {0} u {z = xi_0, xi_1, ..., xi_{K-1}} at one fixed depth. All geometry in a
/// single computation draws its special points from one instance so equal expressions stay
/// identical enclosures.
class SpecialPoints {
public:
    explicit SpecialPoints(const PrecisionConfig& cfg) : cfg_(cfg) {
        cfg_.validate();
        xi_.reserve(cfg_.depth);
        for (unsigned j = 0; j < cfg_.depth; ++j) xi_.push_back(xi_point(j, cfg_));
    }

    const PrecisionConfig& config() const noexcept { return cfg_; }
    unsigned available() const noexcept { return static_cast<unsigned>(xi_.size()); }
    const BoundedValue& z() const { return xi_.front(); }

    const BoundedValue& xi(unsigned j) const {
        if (j >= xi_.size())
            throw PrecisionExhausted("xi_" + std::to_string(j) + " unavailable at depth " + std::to_string(cfg_.depth));
        return xi_[j];
    }

private:
    PrecisionConfig cfg_;
    std::vector<BoundedValue> xi_;
};

/// Runs fn(cfg), doubling the depth after each PrecisionExhausted until max_depth.
template <class Fn>
auto with_precision(PrecisionConfig cfg, Fn&& fn) -> decltype(fn(cfg)) {
    cfg.validate();
    for (;;) {
        try {
            return fn(cfg);
        } catch (const PrecisionExhausted&) {
            if (cfg.depth >= cfg.max_depth) throw;
            cfg.depth = std::min(cfg.depth * 2, cfg.max_depth);
        }
    }
}

} // namespace evl
