#include <gtest/gtest.h>

#include "evl/evl.hpp"

using namespace evl;

namespace {

Interval iv(Rational a, Rational b, bool lc = true, bool hc = true) { return {BoundedValue(a), BoundedValue(b), lc, hc}; }

IntervalUnion U(std::vector<Interval> v) { return IntervalUnion::normalize(std::move(v)); }

void expect_parts(const IntervalUnion& u, const std::vector<Interval>& want) {
    ASSERT_EQ(u.size(), want.size());
    for (std::size_t i = 0; i < want.size(); ++i) {
        const Interval& p = u.parts()[i];
        EXPECT_EQ(p.lo.value(), want[i].lo.value()) << i;
        EXPECT_EQ(p.hi.value(), want[i].hi.value()) << i;
        EXPECT_EQ(p.lo_closed, want[i].lo_closed) << i;
        EXPECT_EQ(p.hi_closed, want[i].hi_closed) << i;
    }
}

const Rational r(long a, long b) { return Rational(a, b); }

} // namespace

TEST(IntervalUnion, NormalizeMergesOverlap) {
    expect_parts(U({iv(r(1, 5), r(2, 5)), iv(r(3, 10), r(1, 2))}), {iv(r(1, 5), r(1, 2))});
}

TEST(IntervalUnion, EmptyHasMeasureZero) {
    const IntervalUnion e = U({});
    EXPECT_TRUE(e.empty());
    EXPECT_EQ(e.measure().value(), 0);
}

TEST(IntervalUnion, TouchingClosedEndpointsMerge) {
    expect_parts(U({iv(0, r(1, 3)), iv(r(1, 3), r(2, 3))}), {iv(0, r(2, 3))});
}

TEST(IntervalUnion, TouchingOpenEndpointsStaySeparate) {
    const IntervalUnion u = U({iv(0, r(1, 3), true, false), iv(r(1, 3), r(2, 3), false, true)});
    EXPECT_EQ(u.size(), 2u);
    EXPECT_EQ(u.contains(r(1, 3)), false);
    EXPECT_EQ(u.measure().value(), r(2, 3));
}

TEST(IntervalUnion, Complement) {
    expect_parts(complement(U({iv(r(1, 4), r(1, 2))})),
                 {iv(0, r(1, 4), true, false), iv(r(1, 2), 1, false, false)});
    expect_parts(complement(IntervalUnion::empty_set()), {iv(0, 1, true, false)});
    EXPECT_TRUE(complement(IntervalUnion::unit()).empty());
}

TEST(IntervalUnion, Intersect) {
    const IntervalUnion a = U({iv(0, r(1, 2))});
    expect_parts(intersect(a, U({iv(r(1, 4), r(3, 4))})), {iv(r(1, 4), r(1, 2))});
    EXPECT_TRUE(intersect(U({iv(0, r(1, 4))}), U({iv(r(1, 2), r(3, 4))})).empty());
    expect_parts(intersect(a, a), {iv(0, r(1, 2))});
}

TEST(IntervalUnion, Measure) {
    EXPECT_EQ(U({iv(0, r(1, 3))}).measure().value(), r(1, 3));
    EXPECT_EQ(complement(U({iv(0, r(1, 3))})).measure().value(), r(2, 3));
}

TEST(IntervalUnion, UniteAndDifference) {
    const IntervalUnion a = U({iv(0, r(1, 2))});
    const IntervalUnion b = U({iv(r(1, 4), r(3, 4))});
    expect_parts(unite(a, b), {iv(0, r(3, 4))});
    expect_parts(difference(a, b), {iv(0, r(1, 4), true, false)});
}

TEST(IntervalUnion, ContainsUndecidedNearUncertainEndpoint) {
    const IntervalUnion u = U({Interval{BoundedValue(r(1, 3), r(1, 1024)), BoundedValue(r(1, 2)), true, true}});
    EXPECT_EQ(u.contains(r(1, 3)), std::nullopt);
    EXPECT_EQ(u.contains(r(2, 5)), true);
    EXPECT_EQ(u.contains(r(1, 5)), false);
}

TEST(IntervalUnion, MeasureWithin) {
    const IntervalUnion u = U({iv(0, r(1, 3)), iv(r(2, 3), 1, true, false)});
    EXPECT_EQ(measure_within(u, BoundedValue(r(1, 6)), BoundedValue(r(5, 6))).value(), r(1, 3));
}
