#include <gtest/gtest.h>

#include "evl/evl.hpp"

using namespace evl;

TEST(ThetaExample1, ClosedForm) {
    const BoundedValue th = theta_closed_form_ex1(3, {});
    EXPECT_LT(Rational(th.upper() - th.lower()), parse_rational("1e-20"));
    // independent 80-digit mpmath evaluation of the same series
    EXPECT_EQ(to_decimal(th, 20), "9.9928970194655215612e-01");
    EXPECT_EQ(to_decimal(th, 15), "9.99289701946552e-01");
}

TEST(ThetaExample1, FirstTermsAlreadyClose) {
    const BoundedValue a = theta_closed_form_ex1(1, {});
    const BoundedValue b = theta_closed_form_ex1(2, {});
    const SpecialPoints pts({4, 12});
    EXPECT_LT(detail::abs(Rational(a.value() - b.value())), detail::inv_pow3(6) * pts.xi(1).upper());
}

TEST(ThetaExample1, FiniteNApproachesLimit) {
    const ObservableSpec s = ObservableSpec::example1();
    const BoundedValue th = theta_closed_form_ex1(3, {});
    const ThresholdAnalysis a = analyze_threshold(s, level_for_tau(s, detail::pow_ui(3, 243), Rational(1)));
    EXPECT_LT(std::abs((a.theta_n - th).to_double()), 1e-15);
}

TEST(ThetaExample1, AnalysisInvariants) {
    const ObservableSpec s = ObservableSpec::example1();
    for (long n : {1000L, 10000L, 100000L}) {
        const ThresholdAnalysis a = analyze_threshold(s, level_for_tau(s, BigInt(n), Rational(1)));
        EXPECT_GE(a.theta_n.lower(), 0);
        EXPECT_LE(a.theta_n.upper(), 1);
        EXPECT_TRUE(difference(a.A_set, a.U_tilde).empty());
    }
}

TEST(ThetaExample2, FormulaAndGeometry) {
    const ObservableSpec s = ObservableSpec::example2();
    const LevelPlan plan = level_for_tau(s, BigInt(10000), Rational(1));
    const BoundedValue f = theta_n_ex2(plan, PrecisionConfig{});
    const ThresholdAnalysis a = analyze_threshold(s, plan);
    EXPECT_GT(f.to_double(), 0.5);
    EXPECT_LT(f.to_double(), 1.0);
    EXPECT_GT(a.theta_n.to_double(), 0.5);
    EXPECT_LE(a.bv_norm_A, bv_bound_for(ObservableKind::Example2, plan.N));
    // the two disagree at finite n; the gap stays below a few percent
    EXPECT_LT(std::abs((f - a.theta_n).to_double()), 0.05);
}

TEST(ThetaGeneric, ZeroRunLengthKeepsEverything) {
    GenericObservable g;
    g.h_type = 2;
    g.param = 1;
    g.centre = Rational(1, 7);
    g.q = 0;
    const ObservableSpec s = ObservableSpec::generic_at(g);
    const ThresholdAnalysis a = analyze_threshold(s, level_for_tau(s, BigInt(500), Rational(1)));
    EXPECT_EQ(a.theta_n.value(), 1);
}

TEST(Hypotheses, DecreasingWithBoundDominatedByExponential) {
    const ObservableSpec s = ObservableSpec::example1();
    std::vector<ThresholdAnalysis> as;
    for (long n : {100L, 10000L, 1000000L}) as.push_back(analyze_threshold(s, level_for_tau(s, BigInt(n), Rational(1))));
    const HypothesisTable t = check_hypotheses(as, DecayModel{}, ObservableKind::Example1);
    ASSERT_EQ(t.rows.size(), 3u);
    EXPECT_LT(t.rows[1].H1, t.rows[0].H1);
    EXPECT_LT(t.rows[2].H1, t.rows[1].H1);
    // (4N+1) n r^(ceil sqrt n) with r = 1/3 at n = 10^6
    const DecayModel d;
    EXPECT_EQ(t.rows[2].H1_bound, Rational(17) * Rational(1000000) * d.rho(1000));
}

TEST(Hypotheses, H2BlowsUpAsRApproachesOne) {
    const ObservableSpec s = ObservableSpec::example1();
    const std::vector<ThresholdAnalysis> as{analyze_threshold(s, level_for_tau(s, BigInt(10000), Rational(1)))};
    DecayModel slow;
    slow.r = Rational(999, 1000);
    const auto fast_t = check_hypotheses(as, DecayModel{}, ObservableKind::Example1);
    const auto slow_t = check_hypotheses(as, slow, ObservableKind::Example1);
    EXPECT_GT(slow_t.rows[0].H2, 100 * fast_t.rows[0].H2);
    DecayModel bad;
    bad.r = 1;
    EXPECT_THROW(check_hypotheses(as, bad, ObservableKind::Example1), BadConfig);
}

TEST(Hypotheses, Example2BoundBelowFiveN) {
    for (unsigned N = 7; N < 20; ++N) EXPECT_LT(bv_bound_for(ObservableKind::Example2, N), 5 * N);
}

TEST(Dprime, Example2AtSmallN) {
    const ObservableSpec s = ObservableSpec::example2();
    const DprimeResult d = dprime_sum(s, level_for_tau(s, BigInt(100), Rational(1)));
    EXPECT_EQ(d.j_first, d.q + 1);
    EXPECT_LT(d.value.radius(), parse_rational("1e-20"));
    EXPECT_GT(d.value.to_double(), 0);
    EXPECT_EQ(d.violations, 0u);
}
