#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <vector>

#include "evl/bounded_value.hpp"

namespace evl {

struct Interval {
    BoundedValue lo;
    BoundedValue hi;
    bool lo_closed = true;
    bool hi_closed = false;

    static Interval closed(BoundedValue lo, BoundedValue hi) { return {std::move(lo), std::move(hi), true, true}; }
    static Interval open(BoundedValue lo, BoundedValue hi) { return {std::move(lo), std::move(hi), false, false}; }
    static Interval closed_open(BoundedValue lo, BoundedValue hi) { return {std::move(lo), std::move(hi), true, false}; }
    static Interval open_closed(BoundedValue lo, BoundedValue hi) { return {std::move(lo), std::move(hi), false, true}; }

    friend bool operator==(const Interval& a, const Interval& b) {
        return identical(a.lo, b.lo) && identical(a.hi, b.hi) && a.lo_closed == b.lo_closed && a.hi_closed == b.hi_closed;
    }
};

namespace detail {

enum class Shape { Empty, Point, Proper };

inline Shape shape(const Interval& iv) {
    switch (order_points(iv.lo, iv.hi)) {
    case Ordering::Less: return Shape::Proper;
    case Ordering::Equal: return (iv.lo_closed && iv.hi_closed) ? Shape::Point : Shape::Empty;
    default: return Shape::Empty;
    }
}

// Appends `next` to a sorted disjoint run, merging when it overlaps or touches the last part.
inline void append_merging(std::vector<Interval>& out, Interval next) {
    if (!out.empty()) {
        Interval& last = out.back();
        Ordering o = order_points(next.lo, last.hi);
        bool joins = o == Ordering::Less || (o == Ordering::Equal && (next.lo_closed || last.hi_closed));
        if (joins) {
            Ordering h = order_points(next.hi, last.hi);
            if (h == Ordering::Greater) {
                last.hi = std::move(next.hi);
                last.hi_closed = next.hi_closed;
            } else if (h == Ordering::Equal) {
                last.hi_closed = last.hi_closed || next.hi_closed;
            }
            return;
        }
    }
    out.push_back(std::move(next));
}

} // namespace detail

/// Finite sorted disjoint union of subintervals of [0,1). Endpoints carry explicit
/// open/closed flags; degenerate closed parts are atoms of measure zero.
class IntervalUnion {
public:
    IntervalUnion() = default;

    static IntervalUnion empty_set() { return {}; }
    static IntervalUnion unit() {
        IntervalUnion u;
        u.parts_.push_back(Interval::closed_open(BoundedValue(0), BoundedValue(1)));
        return u;
    }

    /// Sorted disjoint cover of the same point set. Throws PrecisionExhausted when an
    /// ordering needed for this cannot be decided.
    static IntervalUnion normalize(std::vector<Interval> raw) {
        std::vector<Interval> keep;
        keep.reserve(raw.size());
        for (auto& iv : raw) {
            if (order_points(iv.lo, BoundedValue(0)) == Ordering::Less ||
                order_points(iv.hi, BoundedValue(1)) == Ordering::Greater)
                throw std::invalid_argument("IntervalUnion: part outside [0,1]");
            if (detail::shape(iv) != detail::Shape::Empty) keep.push_back(std::move(iv));
        }
        std::sort(keep.begin(), keep.end(), [](const Interval& a, const Interval& b) {
            Ordering o = order_points(a.lo, b.lo);
            if (o == Ordering::Equal) return a.lo_closed && !b.lo_closed;
            return o == Ordering::Less;
        });
        IntervalUnion u;
        for (auto& iv : keep) detail::append_merging(u.parts_, std::move(iv));
        return u;
    }

    /// Builds from parts already known to be sorted; still merges touching neighbours.
    static IntervalUnion from_sorted(std::vector<Interval> sorted) {
        IntervalUnion u;
        u.parts_.reserve(sorted.size());
        for (auto& iv : sorted)
            if (detail::shape(iv) != detail::Shape::Empty) detail::append_merging(u.parts_, std::move(iv));
        return u;
    }

    std::span<const Interval> parts() const noexcept { return parts_; }
    std::size_t size() const noexcept { return parts_.size(); }
    bool empty() const noexcept { return parts_.empty(); }
    const Interval& operator[](std::size_t i) const { return parts_[i]; }

    /// Number of parts of positive length (connected components up to null sets).
    std::size_t components() const {
        return static_cast<std::size_t>(std::count_if(parts_.begin(), parts_.end(), [](const Interval& iv) {
            return detail::shape(iv) == detail::Shape::Proper;
        }));
    }

    BoundedValue measure() const {
        BoundedValue m(0);
        for (const auto& iv : parts_) m = m + (iv.hi - iv.lo);
        return clamp_nonnegative(m);
    }

    /// Membership of an exact rational; nullopt when x falls inside an endpoint enclosure.
    std::optional<bool> contains(const Rational& x) const {
        const BoundedValue p(x);
        // first part whose hi is not below x
        auto it = std::partition_point(parts_.begin(), parts_.end(), [&](const Interval& iv) {
            return iv.hi.upper() < x;
        });
        for (; it != parts_.end(); ++it) {
            Ordering lo = compare(it->lo, p);
            Ordering hi = compare(p, it->hi);
            if (lo == Ordering::Inconclusive || hi == Ordering::Inconclusive) return std::nullopt;
            if (lo == Ordering::Greater) return false;
            bool after_lo = lo == Ordering::Less || (lo == Ordering::Equal && it->lo_closed);
            bool before_hi = hi == Ordering::Less || (hi == Ordering::Equal && it->hi_closed);
            if (after_lo && before_hi) return true;
            if (lo == Ordering::Equal && !it->lo_closed) return false;
        }
        return false;
    }

    friend bool operator==(const IntervalUnion& a, const IntervalUnion& b) { return a.parts_ == b.parts_; }

private:
    std::vector<Interval> parts_;
};

/// Complement within [0,1).
inline IntervalUnion complement(const IntervalUnion& u) {
    std::vector<Interval> gaps;
    BoundedValue cursor(0);
    bool cursor_closed = true;
    for (const auto& iv : u.parts()) {
        gaps.push_back({cursor, iv.lo, cursor_closed, !iv.lo_closed});
        cursor = iv.hi;
        cursor_closed = !iv.hi_closed;
    }
    gaps.push_back({cursor, BoundedValue(1), cursor_closed, false});
    return IntervalUnion::from_sorted(std::move(gaps));
}

inline IntervalUnion intersect(const IntervalUnion& a, const IntervalUnion& b) {
    std::vector<Interval> out;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const Interval& x = a[i];
        const Interval& y = b[j];
        Interval r;
        switch (order_points(x.lo, y.lo)) {
        case Ordering::Less: r.lo = y.lo; r.lo_closed = y.lo_closed; break;
        case Ordering::Greater: r.lo = x.lo; r.lo_closed = x.lo_closed; break;
        default: r.lo = x.lo; r.lo_closed = x.lo_closed && y.lo_closed; break;
        }
        Ordering h = order_points(x.hi, y.hi);
        switch (h) {
        case Ordering::Less: r.hi = x.hi; r.hi_closed = x.hi_closed; break;
        case Ordering::Greater: r.hi = y.hi; r.hi_closed = y.hi_closed; break;
        default: r.hi = x.hi; r.hi_closed = x.hi_closed && y.hi_closed; break;
        }
        if (detail::shape(r) != detail::Shape::Empty) out.push_back(std::move(r));
        if (h != Ordering::Greater) ++i;
        if (h != Ordering::Less) ++j;
    }
    return IntervalUnion::from_sorted(std::move(out));
}

inline IntervalUnion unite(const IntervalUnion& a, const IntervalUnion& b) {
    std::vector<Interval> all(a.parts().begin(), a.parts().end());
    all.insert(all.end(), b.parts().begin(), b.parts().end());
    return IntervalUnion::normalize(std::move(all));
}

inline IntervalUnion difference(const IntervalUnion& a, const IntervalUnion& b) { return intersect(a, complement(b)); }

inline BoundedValue measure(const IntervalUnion& u) { return u.measure(); }

/// Lebesgue measure of u intersected with [x, y].
inline BoundedValue measure_within(const IntervalUnion& u, const BoundedValue& x, const BoundedValue& y) {
    BoundedValue m(0);
    for (const auto& iv : u.parts()) {
        if (iv.hi.upper() <= x.lower()) continue;
        if (iv.lo.lower() >= y.upper()) break;
        m = m + clamp_nonnegative(enclosure_min(iv.hi, y) - enclosure_max(iv.lo, x));
    }
    return clamp_nonnegative(m);
}

} // namespace evl
