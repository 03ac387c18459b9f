#include <gtest/gtest.h>

#include "nmpgain/factorization.hpp"
#include "nmpgain/random_systems.hpp"
#include "oracles.hpp"

using namespace nmpgain;

namespace {

double rel_diff(Complex a, Complex b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// Proper function whose poles may sit in either half plane, but off the axis.
TransferFunction random_proper_any_poles(Rng& rng) {
    std::uniform_int_distribution<int> deg(1, 5);
    const int nd = deg(rng);
    std::uniform_int_distribution<int> ndeg(0, nd);
    auto ps = random_stable_roots(rng, nd);
    if (rng() % 2) {
        ps = mirror_into_rhp(ps);
    }
    const auto zs = random_stable_roots(rng, ndeg(rng));
    return TransferFunction::from_factors(random_gain(rng), zs, ps);
}

} // namespace

TEST(Coprime, ReconstructsBothFunctions) {
    Rng rng(99);
    for (int i = 0; i < 200; ++i) {
        const auto t1 = random_proper_any_poles(rng);
        const auto t2 = random_proper_any_poles(rng);
        for (auto side : {FactorSide::right, FactorSide::left}) {
            const auto cp = coprime_factorize(t1, t2, side);
            EXPECT_TRUE(is_stable(cp.n_first));
            EXPECT_TRUE(is_stable(cp.n_second));
            EXPECT_TRUE(is_stable(cp.m));
            EXPECT_TRUE(is_proper(cp.m));
            for (Complex s : {Complex{0.0, 0.5}, Complex{0.2, 3.0}, Complex{1.5, -0.7}}) {
                const Complex m = cp.m(s);
                EXPECT_LE(rel_diff(cp.n_first(s) / m, t1(s)), 1e-8) << i;
                EXPECT_LE(rel_diff(cp.n_second(s) / m, t2(s)), 1e-8) << i;
            }
        }
    }
}

TEST(Coprime, UnstablePolesBecomeZerosOfM) {
    const auto t1 = make_tf(Polynomial{1.0}, Polynomial::from_roots({2.0, -1.0}));
    const auto t2 = make_tf(Polynomial{1.0, 1.0}, Polynomial::from_roots({2.0, -3.0}));
    const auto cp = coprime_factorize(t1, t2, FactorSide::right);
    EXPECT_NEAR(std::abs(cp.m(Complex{2.0})), 0.0, 1e-12);
    // The numerator ratio equals t2 / t1.
    const auto r = numerator_ratio(cp);
    const Complex s{0.4, 0.9};
    EXPECT_LE(rel_diff(r(s), t2(s) / t1(s)), 1e-10);
}

TEST(Coprime, BoundaryPoleIsDegenerate) {
    const auto t1 = make_tf(Polynomial{1.0}, Polynomial{0.0, 1.0, 1.0}); // pole at 0
    const auto t2 = make_tf(Polynomial{1.0}, Polynomial{1.0, 1.0});
    EXPECT_THROW(coprime_factorize(t1, t2, FactorSide::right), DegenerateError);
}

TEST(Coprime, NonProperInputRejected) {
    const auto t1 = make_tf(Polynomial{0.0, 0.0, 1.0}, Polynomial{1.0, 1.0});
    const auto t2 = make_tf(Polynomial{1.0}, Polynomial{1.0, 1.0});
    EXPECT_THROW(coprime_factorize(t1, t2, FactorSide::left), DomainError);
}

TEST(Blaschke, UnitModulusOnAxis) {
    Rng rng(5);
    std::uniform_real_distribution<double> w(-100.0, 100.0);
    for (int i = 0; i < 1000; ++i) {
        std::vector<Complex> zs{random_rhp_point(rng)};
        if (i % 3 == 0) {
            zs.push_back(random_rhp_point(rng));
        }
        const BlaschkeProduct b(zs);
        EXPECT_NEAR(std::abs(b(Complex{0.0, w(rng)})), 1.0, 1e-12);
    }
}

TEST(Blaschke, MatchesDirectProduct) {
    const std::vector<Complex> zs{{1.0, 2.0}, {1.0, -2.0}, {0.5, 0.0}};
    const BlaschkeProduct b(zs);
    const Complex s{3.0, -1.0};
    EXPECT_NEAR(std::abs(b(s)), oracle::blaschke_modulus(zs, s), 1e-14);
    EXPECT_NEAR(std::abs(b.as_transfer()(s) - b(s)), 0.0, 1e-12);
    EXPECT_LT(std::abs(b(s)), 1.0); // strictly inside the right half plane
}

TEST(Blaschke, RejectsNonRhpZeros) {
    EXPECT_THROW(BlaschkeProduct(std::vector<Complex>{-1.0}), DomainError);
    EXPECT_THROW(BlaschkeProduct(std::vector<Complex>{Complex{0.0, 1.0}}), DomainError);
}

TEST(AllpassSplit, FirstOrderHandCase) {
    const auto g = make_tf(Polynomial{-1.0, 1.0}, Polynomial{2.0, 1.0}); // (s-1)/(s+2)
    const auto split = allpass_split(g);
    ASSERT_EQ(split.blaschke.zeros().size(), 1u);
    EXPECT_NEAR(std::abs(split.blaschke.zeros()[0] - 1.0), 0.0, 1e-12);
    EXPECT_NEAR(split.min_phase.num()[0], 1.0, 1e-12);
    EXPECT_NEAR(split.min_phase.num()[1], 1.0, 1e-12);
}

TEST(AllpassSplit, MagnitudeIdentityAndFactorization) {
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
        const auto g = random_stable_proper(rng);
        const auto split = allpass_split(g);
        EXPECT_TRUE(classify_zeros(split.min_phase).nmp_zeros.empty());
        for (int k = 0; k <= 60; ++k) {
            const double w = std::pow(10.0, -3.0 + 0.1 * k);
            const double want = std::abs(g(Complex{0.0, w}));
            EXPECT_NEAR(std::abs(split.min_phase(Complex{0.0, w})), want, 1e-9 * std::max(1.0, want));
        }
        const Complex s{0.8, 0.3};
        EXPECT_LE(rel_diff(split.min_phase(s) * split.blaschke(s), g(s)), 1e-9);
    }
}

TEST(AllpassSplit, AxisZeroIsDegenerate) {
    const auto g = make_tf(Polynomial{0.0, 1.0}, Polynomial{1.0, 1.0});
    EXPECT_THROW(allpass_split(g), DegenerateError);
}
