#include <gtest/gtest.h>

#include "evl/evl.hpp"

using namespace evl;

namespace {

const SpecialPoints& pts6() {
    static const SpecialPoints p({6, 12});
    return p;
}

// low-discrepancy points in (0,1)
Rational weyl(unsigned i) {
    const double golden = 0.6180339887498949;
    double x = std::fmod(0.5 + golden * i, 1.0);
    const auto num = static_cast<unsigned long>(x * 1e12);
    return Rational(BigInt(num == 0 ? 1UL : num), BigInt(1'000'000'000'000UL));
}

} // namespace

TEST(Example1, FullSetAtLevelZero) {
    const ExceedanceSet e = exceedance_set(ObservableSpec::example1(), pts6(), BoundedValue(0));
    // the tents tile (0, z], so the measure is z up to the tail bound
    EXPECT_TRUE((e.measure() - pts6().z()).contains(0) || compare(e.measure(), pts6().z()) == Ordering::Equal);
    EXPECT_NEAR(e.measure().to_double(), pts6().z().to_double(), 1e-30);
}

TEST(Example1, MeasureIsAffineInLevel) {
    const ObservableSpec s = ObservableSpec::example1();
    const BoundedValue m0 = exceedance_measure(s, pts6(), BoundedValue(0));
    for (Rational u : {Rational(1, 2), Rational(9, 10), Rational(999, 1000)}) {
        const BoundedValue m = exceedance_measure(s, pts6(), BoundedValue(u));
        EXPECT_NEAR(m.to_double(), Rational((1 - u) * m0.value()).get_d(), 1e-25);
    }
}

TEST(Example1, TopComponentAtLevel) {
    const Rational u(3, 4);
    const ExceedanceSet e = exceedance_set(ObservableSpec::example1(), pts6(), BoundedValue(u));
    const auto& top = e.parts.back();
    EXPECT_EQ(top.index, 0);
    const BoundedValue& z = pts6().z();
    const BoundedValue& x1 = pts6().xi(1);
    const BoundedValue lo = (x1 + z) * Rational(1, 2) + (z - x1) * Rational(u / 2);
    EXPECT_NEAR(top.part.lo.to_double(), lo.to_double(), 1e-30);
    EXPECT_TRUE(identical(top.part.hi, z));
    EXPECT_TRUE(top.part.hi_closed);
}

TEST(Example1, EvalAtMaximumAndTentFoot) {
    const ObservableSpec s = ObservableSpec::example1({6, 12});
    EXPECT_EQ(eval(s, pts6(), Rational(0)).value(), 1);
    // x = xi_1 exactly is not rational; its truncation still sits within 1e-20 of the peak
    const BoundedValue near_peak = eval(s, pts6(), xi_point(1, {3, 12}).value());
    EXPECT_LT(Rational(1 - near_peak.lower()), parse_rational("1e-20"));
    // foot of the tent between I_1 and I_2
    const BoundedValue foot = midpoint(pts6().xi(1), pts6().xi(2));
    EXPECT_LT(std::abs(eval(s, pts6(), foot.value()).to_double()), 1e-30);
}

TEST(Example1, EvalAgreesWithExceedanceSet) {
    const ObservableSpec s = ObservableSpec::example1({6, 12});
    unsigned decided = 0;
    for (unsigned t = 0; t < 10; ++t) {
        const Rational u(static_cast<long>(t), 10);
        const ExceedanceSet e = exceedance_set(s, pts6(), BoundedValue(u));
        const IntervalUnion cover = e.cover();
        for (unsigned i = 0; i < 1000; ++i) {
            // scale into (0, 0.05) so most points land on the tents
            const Rational x = weyl(i) * Rational(1, 20);
            BoundedValue v(0);
            try {
                v = eval(s, pts6(), x);
            } catch (const PrecisionExhausted&) {
                continue;
            }
            const auto in = cover.contains(x);
            if (!in || compare(v, BoundedValue(u)) == Ordering::Inconclusive) continue;
            EXPECT_EQ(*in, compare(v, BoundedValue(u)) == Ordering::Greater) << "u=" << u << " x=" << x;
            ++decided;
        }
    }
    EXPECT_GT(decided, 9000u);
}

TEST(Example1, ExceedanceSetIsAntitone) {
    const ObservableSpec s = ObservableSpec::example1();
    IntervalUnion prev = exceedance_set(s, pts6(), BoundedValue(0)).cover();
    for (long k = 1; k <= 9; ++k) {
        const IntervalUnion cur = exceedance_set(s, pts6(), BoundedValue(Rational(k, 10))).cover();
        EXPECT_TRUE(difference(cur, prev).empty()) << k;
        prev = cur;
    }
}

TEST(Example1, CutIndex) {
    EXPECT_EQ(ex1_cut_index(BigInt(3)), 1u);
    EXPECT_EQ(ex1_cut_index(BigInt(27)), 2u);
    EXPECT_EQ(ex1_cut_index(BigInt(28)), 3u);
    EXPECT_EQ(ex1_cut_index(BigInt(1000)), 3u);
    EXPECT_EQ(ex1_cut_index(detail::pow_ui(3, 9)), 3u);
    EXPECT_EQ(ex1_cut_index(detail::pow_ui(3, 9) + 1), 4u);
    EXPECT_EQ(ex1_cut_index(detail::pow_ui(3, 27)), 4u);
    EXPECT_EQ(ex1_cut_index(detail::pow_ui(3, 27) + 1), 5u);
}

TEST(Example1, TruncationDropsOnlyDeepComponents) {
    const ObservableSpec s = ObservableSpec::example1();
    const LevelPlan plan = level_for_tau(s, BigInt(1000), Rational(1));
    const ExceedanceSet e = exceedance_set(s, pts6(), plan.u);
    const Truncation all = truncate_exceedance(e, 0);
    EXPECT_EQ(all.set.components(), 1u);
    const Truncation t = truncate_exceedance(e, plan.N);
    // the discarded mass sits near 0 and is negligible against 1/n
    EXPECT_LT(t.discarded_ratio.upper(), Rational(1, 1000));
}

TEST(Example2, ComponentCountAndFormulaAtU20) {
    const ObservableSpec s = ObservableSpec::example2();
    const LevelPlan plan = plan_at_level(s, Rational(20));
    EXPECT_EQ(plan.N, 1u);
    const ExceedanceSet e = exceedance_set(s, pts6(), plan.u);
    EXPECT_EQ(e.cut, 1);
    // leftmost interval plus balls around xi_1 and z
    EXPECT_EQ(e.resolved.components(), 3u);
    // mpmath with 50 digits, reduced N = 1, J = 0 formula
    EXPECT_NEAR(theta_n_ex2(plan, PrecisionConfig{}).to_double(), 0.84437915508812580401, 1e-15);
}

TEST(Example2, EvalAgreesWithExceedanceSet) {
    const ObservableSpec s = ObservableSpec::example2({6, 12});
    for (long u : {5L, 8L, 12L, 20L}) {
        const ExceedanceSet e = exceedance_set(s, pts6(), BoundedValue(u));
        for (unsigned i = 1; i < 500; ++i) {
            const Rational x = weyl(i) * Rational(1, 10);
            const BoundedValue v = eval(s, pts6(), x);
            const auto in = e.resolved.contains(x);
            if (!in || compare(v, BoundedValue(u)) == Ordering::Inconclusive) continue;
            EXPECT_EQ(*in, compare(v, BoundedValue(u)) == Ordering::Greater) << "u=" << u << " x=" << x;
        }
    }
}

TEST(Example2, UndefinedAtZero) {
    EXPECT_THROW(eval(ObservableSpec::example2(), Rational(0)), Undefined);
}

TEST(Generic, BallAroundCentre) {
    GenericObservable g;
    g.h_type = 1;
    g.param = 1;
    g.centre = Rational(1, 2);
    const ObservableSpec s = ObservableSpec::generic_at(g);
    const ExceedanceSet e = exceedance_set(s, pts6(), BoundedValue(5));
    EXPECT_NEAR(e.measure().to_double(), 2 * std::exp(-5.0), 1e-14);
    EXPECT_NEAR(eval(s, Rational(1, 2) + Rational(1, 100)).to_double(), std::log(100.0), 1e-12);
    g.h_type = 4;
    EXPECT_THROW(g.validate(), BadConfig);
}

TEST(LevelPlan, Example1MatchesClosedForm) {
    const ObservableSpec s = ObservableSpec::example1();
    const LevelPlan plan = level_for_tau(s, BigInt(1000), Rational(1));
    // 1 - 1/(1000 z), mpmath
    // the level solver stops once |n mu - tau| <= 1e-9 tau, so u is good to about 3e-11
    EXPECT_NEAR(plan.u.to_double(), 0.9730369863014652003442017, 5e-11);
    EXPECT_EQ(plan.N, 3u);
    EXPECT_EQ(plan.t, BigInt(32));
    EXPECT_EQ(plan.k, BigInt(5));
    EXPECT_LE(detail::abs(Rational(plan.mu.value() * 1000 - 1)), Rational(1, 1'000'000'000));
}

TEST(LevelPlan, Example2MonotoneInTau) {
    const ObservableSpec s = ObservableSpec::example2();
    const LevelPlan a = level_for_tau(s, BigInt(10000), Rational(1));
    const LevelPlan b = level_for_tau(s, BigInt(10000), Rational(2));
    EXPECT_EQ(compare(b.u, a.u), Ordering::Less);
}

TEST(LevelPlan, DoublingNHalvesMeasure) {
    for (const ObservableSpec& s : {ObservableSpec::example1(), ObservableSpec::example2()}) {
        const LevelPlan a = level_for_tau(s, BigInt(4000), Rational(1));
        const LevelPlan b = level_for_tau(s, BigInt(8000), Rational(1));
        EXPECT_NEAR(Rational(b.mu.value() / a.mu.value()).get_d(), 0.5, 1e-8);
    }
}

TEST(LevelPlan, RejectsBadInput) {
    EXPECT_THROW(level_for_tau(ObservableSpec::example1(), BigInt(1000), Rational(0)), Error);
    EXPECT_THROW(level_for_tau(ObservableSpec::example1(), BigInt(0), Rational(1)), Error);
}
