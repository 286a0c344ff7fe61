#include <gtest/gtest.h>

#include "evl/evl.hpp"

using namespace evl;

namespace {

Rational q(const char* s) { return parse_rational(s); }

} // namespace

TEST(BoundedValue, RadiusRoundsUpToPowerOfTwo) {
    const BoundedValue a(Rational(1, 3), Rational(3, 100));
    EXPECT_TRUE(a.contains(Rational(1, 3) + Rational(3, 100)));
    const BoundedValue s = a + BoundedValue(Rational(1, 6), Rational(1, 64));
    EXPECT_EQ(s.value(), Rational(1, 2));
    EXPECT_GE(s.radius(), Rational(3, 100) + Rational(1, 64));
    // derived radii are powers of two
    const Rational rad = s.radius();
    EXPECT_TRUE(rad.get_num() == 1 && mpz_popcount(rad.get_den().get_mpz_t()) == 1);
}

TEST(BoundedValue, CompareExactAndOverlapping) {
    EXPECT_EQ(compare(BoundedValue(Rational(1, 3)), BoundedValue(Rational(1, 2))), Ordering::Less);
    EXPECT_EQ(compare(BoundedValue(Rational(1, 4), Rational(1, 8)), BoundedValue(Rational(1, 4), Rational(1, 8))),
              Ordering::Inconclusive);
    // identical enclosures denote one point
    EXPECT_EQ(order_points(BoundedValue(Rational(1, 4), Rational(1, 8)), BoundedValue(Rational(1, 4), Rational(1, 8))),
              Ordering::Equal);
}

TEST(BoundedValue, ParseAndPrint) {
    EXPECT_EQ(q("0.25"), Rational(1, 4));
    EXPECT_EQ(q("1e-3"), Rational(1, 1000));
    EXPECT_EQ(q("-3/6"), Rational(-1, 2));
    EXPECT_EQ(to_fraction(Rational(2)), "2/1");
    EXPECT_EQ(to_decimal(Rational(1, 3), 5), "3.3333e-01");
}

TEST(SpecialPoints, ZTruncations) {
    const BoundedValue z1 = z_point({1, 12});
    EXPECT_EQ(z1.value(), Rational(1, 27));
    EXPECT_LE(z1.radius(), Rational(3, 2) * detail::inv_pow3(9));

    const BoundedValue z2 = z_point({2, 12});
    EXPECT_EQ(z2.value(), Rational(1, 27) + Rational(1, 19683));

    const BoundedValue z3 = z_point({3, 12});
    EXPECT_LE(detail::abs(Rational(z3.value() - z2.value())), 2 * detail::inv_pow3(27));
    // mpmath, 60 digits: 1/27 + 3^-9 + 3^-27
    EXPECT_NEAR(z3.to_double(), 0.037087842300593465162, 1e-17);
}

TEST(SpecialPoints, XiInsideReferenceBrackets) {
    const PrecisionConfig cfg{8, 12};
    for (unsigned j = 1; j <= 6; ++j) {
        const auto [lo, hi] = xi_reference_bracket(j);
        const BoundedValue x = xi_point(j, cfg);
        EXPECT_TRUE(x.strictly_inside(lo, hi)) << "j=" << j;
    }
    // two terms of the series; the enclosure covers the dropped tail
    const BoundedValue x1 = xi_point(1, {2, 12});
    EXPECT_TRUE(x1.contains(detail::inv_pow3(6) + detail::inv_pow3(24)));
    EXPECT_TRUE(xi_point(1, {3, 12}).contains(detail::inv_pow3(6) + detail::inv_pow3(24)));
}

TEST(SpecialPoints, MidpointsOfNeighbours) {
    // (xi_j + xi_{j-1})/2 lies in [3^(-2 3^(j-1))/2, 3^(-2 3^(j-1))] for j >= 2. At j = 1 the
    // neighbour is z ~ 1/27 and the midpoint ~ 0.0192 falls below 1/18.
    const SpecialPoints pts({7, 12});
    for (unsigned j = 2; j <= 5; ++j) {
        const Rational top = detail::inv_pow3(2 * detail::pow3_ul(j - 1));
        EXPECT_TRUE(midpoint(pts.xi(j), pts.xi(j - 1)).inside(top / 2, top)) << j;
    }
    EXPECT_EQ(compare(midpoint(pts.xi(1), pts.z()), BoundedValue(Rational(1, 18))), Ordering::Less);
}

TEST(SpecialPoints, OrderingAtDepthFour) {
    const SpecialPoints pts({4, 12});
    EXPECT_EQ(compare(pts.xi(2), pts.xi(1)), Ordering::Less);
    EXPECT_EQ(compare(pts.xi(1), pts.z()), Ordering::Less);
}

TEST(SpecialPoints, DepthExhaustion) {
    const SpecialPoints pts({3, 12});
    EXPECT_THROW(pts.xi(3), PrecisionExhausted);
    EXPECT_THROW(xi_point(3, {3, 12}), PrecisionExhausted);
    EXPECT_THROW(PrecisionConfig({13, 12}).validate(), BadConfig);
}

TEST(SpecialPoints, WithPrecisionDoublesDepth) {
    std::vector<unsigned> seen;
    const unsigned got = with_precision(PrecisionConfig{2, 12}, [&](const PrecisionConfig& c) {
        seen.push_back(c.depth);
        if (c.depth < 7) throw PrecisionExhausted("more");
        return c.depth;
    });
    EXPECT_EQ(got, 8u);
    EXPECT_EQ(seen, (std::vector<unsigned>{2, 4, 8}));
    EXPECT_THROW(with_precision(PrecisionConfig{2, 5},
                                [](const PrecisionConfig&) -> int { throw PrecisionExhausted("never"); }),
                 PrecisionExhausted);
}

TEST(Transcendental, ExpAndLogEnclose) {
    const BoundedValue e = exp_neg(Rational(1));
    EXPECT_TRUE(e.contains(q("0.36787944117144233")) || std::abs(e.to_double() - 0.36787944117144233) < 1e-16);
    EXPECT_LT(e.radius(), q("1e-70"));
    const BoundedValue l = log_of(BoundedValue(Rational(1, 1000)));
    EXPECT_NEAR(l.to_double(), -6.907755278982137, 1e-14);
}
