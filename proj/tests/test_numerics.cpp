#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "cvsat/errors.hpp"
#include "cvsat/numerics.hpp"
#include "oracles.hpp"

using namespace cvsat;

TEST(GaussLegendre, MatchesGolubWelsch) {
    for (int n : {1, 2, 5, 16, 64, 128}) {
        const auto ours = gauss_legendre(n);
        const auto ref = oracle::golub_welsch(n);
        ASSERT_EQ(ours.size(), static_cast<std::size_t>(n));
        std::vector<WeightedNode> sorted(ours.begin(), ours.end());
        std::sort(sorted.begin(), sorted.end(), [](auto a, auto b) { return a.x < b.x; });
        for (int k = 0; k < n; ++k) {
            EXPECT_NEAR(sorted[k].x, ref.x[k], 1e-13);
            EXPECT_NEAR(sorted[k].w, ref.w[k], 1e-13);
        }
    }
}

TEST(GaussLegendre, ExactForPolynomialsUpToDegree2nMinus1) {
    const int n = 12;
    const auto rule = gauss_legendre(n);
    for (int p = 0; p <= 2 * n - 1; ++p) {
        double sum = 0.0;
        for (const auto& node : rule) sum += node.w * std::pow(node.x, p);
        const double exact = p % 2 == 1 ? 0.0 : 2.0 / (p + 1);
        EXPECT_NEAR(sum, exact, 1e-14) << p;
    }
}

TEST(Quadrature, SpecValidation) {
    EXPECT_NO_THROW((QuadratureSpec{8, 1}.validate()));
    EXPECT_THROW((QuadratureSpec{4, 8}.validate()), DomainError);
    EXPECT_THROW((QuadratureSpec{64, 0}.validate()), DomainError);
    EXPECT_EQ(QuadratureSpec{}.doubled().subdivisions, 16);
}

TEST(Quadrature, CompositeIntegrals) {
    QuadratureSpec spec{16, 4};
    EXPECT_NEAR(integrate_1d([](double x) { return std::exp(-x); }, 0.0, 5.0, spec), 1.0 - std::exp(-5.0), 1e-14);
    const double two_d = integrate_2d([](double x, double y) { return std::sin(x) * std::cos(y); },
                                      Box{0.0, std::numbers::pi, 0.0, 1.0}, spec);
    EXPECT_NEAR(two_d, 2.0 * std::sin(1.0), 1e-13);
}

TEST(Quadrature, NonFiniteIntegrandThrows) {
    EXPECT_THROW(integrate_1d([](double x) { return x > 0.3 ? std::log(-x) : 1.0; }, 0.0, 1.0, QuadratureSpec{9, 2}),
                 NumericalError);
}

TEST(Quadrature, CompositeRuleOnBreaks) {
    const double breaks[] = {0.0, 0.5, 2.0};
    const auto rule = composite_rule(breaks, 8);
    EXPECT_EQ(rule.size(), 16u);
    double total = 0.0;
    for (const auto& n : rule) total += n.w;
    EXPECT_NEAR(total, 2.0, 1e-14);
}

TEST(SpecialFunctions, ErfcAgainstSeriesAndContinuedFraction) {
    for (double x = -4.0; x <= 8.0; x += 0.173) {
        const double ref = oracle::erfc_reference(x);
        EXPECT_NEAR(cvsat::erfc(x), ref, 1e-14 + 1e-12 * ref) << x;
    }
    EXPECT_DOUBLE_EQ(cvsat::erfc(-INFINITY), 2.0);
    EXPECT_DOUBLE_EQ(cvsat::erfc(INFINITY), 0.0);
}

TEST(SpecialFunctions, BesselAgainstPowerSeries) {
    for (int order : {0, 1}) {
        for (double x : {0.0, 1e-3, 0.4, 1.0, 2.56, 4.0, 10.0, 35.0}) {
            const double ref = oracle::bessel_i_series(order, x);
            EXPECT_NEAR(bessel_i(order, x), ref, 1e-13 * std::max(1.0, ref)) << order << " " << x;
        }
    }
    EXPECT_THROW(bessel_i(0, -1.0), DomainError);
}

TEST(Rng, UniformRangeAndMoments) {
    Rng rng(3);
    double sum = 0.0, sum2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        const double up = rng.uniform_pos();
        ASSERT_GT(up, 0.0);
        sum += u;
        sum2 += u * u;
    }
    EXPECT_NEAR(sum / n, 0.5, 4 * std::sqrt(1.0 / 12 / n));
    EXPECT_NEAR(sum2 / n, 1.0 / 3, 0.003);
}

TEST(MonteCarlo, DeterministicAcrossWorkerCounts) {
    McSpec spec;
    spec.samples = 50000;
    spec.seed = 99;
    const auto draw = [](Rng& rng) { return rng.uniform() * rng.uniform(); };
    spec.workers = 1;
    const auto one = mc_expectation(draw, spec);
    spec.workers = 4;
    const auto four = mc_expectation(draw, spec);
    EXPECT_EQ(one.mean, four.mean);
    EXPECT_EQ(one.std_err, four.std_err);
    EXPECT_NEAR(one.mean, 0.25, 4 * one.std_err);
}

TEST(MonteCarlo, StandardErrorScalesAsExpected) {
    McSpec spec;
    spec.samples = 100000;
    const auto est = mc_expectation([](Rng& rng) { return rng.uniform(); }, spec);
    EXPECT_NEAR(est.std_err, std::sqrt(1.0 / 12.0 / spec.samples), 1e-5);
}

TEST(MonteCarlo, RejectsTinySampleCounts) {
    McSpec spec;
    spec.samples = 100;
    EXPECT_THROW(mc_expectation([](Rng& rng) { return rng.uniform(); }, spec), DomainError);
}

TEST(MonteCarlo, SplitMixSpreadsSeeds) {
    EXPECT_NE(splitmix64(1), splitmix64(2));
    EXPECT_EQ(splitmix64(42), splitmix64(42));
}
