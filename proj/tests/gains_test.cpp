#include <gtest/gtest.h>

#include "nmpgain/gains.hpp"
#include "nmpgain/random_systems.hpp"
#include "oracles.hpp"

using namespace nmpgain;

namespace {

TransferFunction tf(std::vector<Complex> zs, std::vector<Complex> ps, double k = 1.0) {
    return TransferFunction::from_factors(k, zs, ps);
}

TransferFunction fault_side() { return tf({-0.1, -0.2, -0.6}, {-0.3, -0.4, -0.5}); }
TransferFunction disturbance_side(double tau) { return tf({-1.0, 0.04, tau}, {-0.3, -0.4, -0.5}); }

} // namespace

TEST(HinfNorm, FirstOrderLowPass) {
    const auto r = hinf_norm(tf({}, {-1.0}));
    EXPECT_DOUBLE_EQ(r.value, 1.0);
    EXPECT_EQ(r.peak_omega, 0.0);
}

TEST(HinfNorm, PeakAtInfinity) {
    const auto r = hinf_norm(tf({0.5}, {-1.0}, 3.0)); // 3(s-0.5)/(s+1): 1.5 at DC, 3 at infinity
    EXPECT_DOUBLE_EQ(r.value, 3.0);
    EXPECT_TRUE(std::isinf(r.peak_omega));
}

TEST(HinfNorm, SecondOrderResonance) {
    const double zeta = 0.1;
    const auto g = make_tf(Polynomial{1.0}, Polynomial{1.0, 2.0 * zeta, 1.0});
    const auto r = hinf_norm(g);
    EXPECT_NEAR(r.value, 1.0 / (2.0 * zeta * std::sqrt(1.0 - zeta * zeta)), 1e-12);
    EXPECT_NEAR(r.peak_omega, std::sqrt(1.0 - 2.0 * zeta * zeta), 1e-9);
}

TEST(HinfNorm, ZeroNonProperUnstable) {
    EXPECT_EQ(hinf_norm(TransferFunction{}).value, 0.0);
    EXPECT_TRUE(std::isinf(hinf_norm(make_tf(Polynomial{0.0, 0.0, 1.0}, Polynomial{1.0, 1.0})).value));
    EXPECT_THROW(hinf_norm(tf({}, {1.0})), DomainError);
}

TEST(HinfNorm, AgreesWithGridOracle) {
    Rng rng(17);
    for (int i = 0; i < 40; ++i) {
        const auto g = random_stable_proper(rng);
        const auto want = oracle::hinf(g.num().coeffs(), g.den().coeffs(), 200000);
        const auto got = hinf_norm(g);
        EXPECT_NEAR(got.value, want.value, 1e-6 * want.value) << i;
        EXPECT_NEAR(std::abs(freq_response(g, std::isinf(got.peak_omega) ? 1e12 : got.peak_omega)), got.value,
                    1e-6 * got.value);
    }
}

TEST(HMinusIndex, AgreesWithGridOracle) {
    Rng rng(18);
    for (int i = 0; i < 40; ++i) {
        const auto g = random_min_phase_biproper(rng);
        const auto want = oracle::hminus(g.num().coeffs(), g.den().coeffs(), 200000);
        EXPECT_NEAR(h_minus_index(g), want.value, 1e-6 * want.value) << i;
    }
}

TEST(Example, FrozenNorms) {
    // Values from the dense-grid oracle at tau = 20.
    EXPECT_NEAR(hinf_norm(disturbance_side(20.0)).value, 51.1748489, 1e-6);
    EXPECT_NEAR(hinf_norm(fault_side()).value, 1.0, 1e-12);
    EXPECT_NEAR(h_minus_index(fault_side()), 0.2, 1e-12);
    const auto g = iig_lower(fault_side(), disturbance_side(20.0));
    EXPECT_NEAR(g.hinf_ratio, 114.331952, 1e-5);
    EXPECT_NEAR(g.peak_omega, 0.123407, 1e-5);
    EXPECT_NEAR(g.iig_lower, 4.0 * g.hinf_ratio * g.hinf_ratio, 1e-9 * g.iig_lower);
}

TEST(Example, OracleReproducesFrozenValues) {
    const auto d = disturbance_side(20.0);
    EXPECT_NEAR(oracle::hinf(d.num().coeffs(), d.den().coeffs()).value, 51.1748489, 1e-6);
    // N_d / N_f reduces to T_dr / T_fr when both are stable.
    const auto num = oracle::expand_real({-1.0, 0.04, 20.0});
    const auto den = oracle::expand_real({-0.1, -0.2, -0.6});
    EXPECT_NEAR(oracle::hinf(num, den).value, 114.331952, 1e-5);
}

TEST(Gains, OrientationsAndScaling) {
    const auto first = tf({-2.0}, {-1.0, -3.0});
    const auto second = tf({1.0}, {-1.0, -4.0});
    const auto o = oog(first, second);
    const auto i = iig_lower(first, second);
    EXPECT_TRUE(o.finite());
    EXPECT_NEAR(o.oog, o.hinf_ratio * o.hinf_ratio, 1e-12);
    EXPECT_NEAR(i.iig_lower, 4.0 * i.hinf_ratio * i.hinf_ratio, 1e-12);
    EXPECT_NEAR(o.hinf_ratio, i.hinf_ratio, 1e-12);
    const auto scaled = oog(first, tf({1.0}, {-1.0, -4.0}, 3.0));
    EXPECT_NEAR(scaled.oog, 9.0 * o.oog, 1e-9 * scaled.oog);
}

TEST(Gains, CommonStableFactorDoesNotChangeTheGain) {
    Rng rng(23);
    for (int n = 0; n < 50; ++n) {
        const auto a = random_min_phase_biproper(rng);
        const auto b = random_stable_proper(rng);
        const auto w = random_min_phase_biproper(rng);
        const auto base = iig_lower(a, b);
        const auto with = iig_lower(make_tf(a.num() * w.num(), a.den() * w.den()),
                                    make_tf(b.num() * w.num(), b.den() * w.den()));
        EXPECT_NEAR(with.hinf_ratio, base.hinf_ratio, 1e-6 * base.hinf_ratio) << n;
    }
}

TEST(Gains, NonProperRatioIsInfinite) {
    const auto r = oog(tf({}, {-1.0, -2.0}), tf({}, {-3.0}, 3.0));
    ASSERT_FALSE(r.finite());
    EXPECT_EQ(*r.infinite_reason, InfiniteReason::non_proper);
    EXPECT_TRUE(std::isinf(r.oog));
    EXPECT_EQ(to_string(*r.infinite_reason), "non_proper");
}

TEST(Gains, UnsharedNmpZeroIsInfinite) {
    // T_fr has a right-half-plane zero that T_dr does not share.
    const auto r = iig_lower(tf({0.5}, {-1.0, -2.0}), tf({}, {-1.0, -2.0}));
    ASSERT_FALSE(r.finite());
    EXPECT_EQ(*r.infinite_reason, InfiniteReason::unshared_nmp_zero_in_divisor);
    EXPECT_TRUE(std::isinf(r.iig_lower));
}

TEST(Gains, SharedNmpZeroCancels) {
    const auto r = iig_lower(tf({0.5, -3.0}, {-1.0, -2.0}), tf({0.5, -4.0}, {-1.0, -2.0}));
    EXPECT_TRUE(r.finite());
    EXPECT_NEAR(r.hinf_ratio, 4.0 / 3.0, 1e-9); // (s+4)/(s+3), peak at DC
}

TEST(Gains, AxisZeroInDivisorIsDegenerate) {
    EXPECT_THROW(iig_lower(tf({0.0}, {-1.0}), tf({}, {-1.0})), DegenerateError);
}

TEST(ClassicalBracket, HoldsOnRandomSystems) {
    Rng rng(29);
    for (int n = 0; n < 200; ++n) {
        const auto first = random_min_phase_biproper(rng);
        const auto second = random_stable_proper(rng);
        const auto r = oog(first, second);
        ASSERT_TRUE(r.classical_lo && r.classical_hi);
        const double sq = r.hinf_ratio * r.hinf_ratio;
        EXPECT_LE(*r.classical_lo, sq * (1.0 + 1e-9)) << n;
        EXPECT_LE(sq, *r.classical_hi * (1.0 + 1e-9)) << n;
    }
}

TEST(ClassicalBracket, ExampleValues) {
    const auto b = classical_bounds(fault_side(), disturbance_side(20.0));
    EXPECT_NEAR(std::sqrt(b.lo), 51.1748489, 1e-6);
    EXPECT_NEAR(std::sqrt(b.hi), 51.1748489 / 0.2, 1e-5);
}
