#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <cctype>
#include <cmath>
#include <numbers>

using namespace opmean;

namespace {

/// Log-spaced grid on [lo, hi].
std::vector<double> log_grid(double lo, double hi, int n)
{
    std::vector<double> out;
    for (int i = 0; i < n; ++i) {
        out.push_back(std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n - 1)));
    }
    return out;
}

/// Grid points of [1e-3, 1e3] mapped into the mean's range.
std::vector<double> range_grid(const MeanDescriptor& sigma, int n)
{
    std::vector<double> out;
    for (double x : log_grid(1e-3, 1e3, n)) {
        const double t = sigma.f(x);
        if (sigma.range().contains(t)) {
            out.push_back(t);
        }
    }
    return out;
}

class EveryMean : public ::testing::TestWithParam<MeanDescriptor> {};

std::string mean_name(const ::testing::TestParamInfo<MeanDescriptor>& info)
{
    std::string s = info.param.name();
    for (char& c : s) {
        if (!std::isalnum(static_cast<unsigned char>(c))) {
            c = '_';
        }
    }
    return s;
}

std::vector<MeanDescriptor> all_descriptors()
{
    std::vector<MeanDescriptor> out = builtin_means();
    for (const auto& m : builtin_means()) {
        out.push_back(m.adjoint());
    }
    return out;
}

} // namespace

INSTANTIATE_TEST_SUITE_P(Registry, EveryMean, ::testing::ValuesIn(all_descriptors()), mean_name);

TEST_P(EveryMean, NormalizedWithHalfSlopeAtOne)
{
    const MeanDescriptor& s = GetParam();
    EXPECT_NEAR(s.f(1.0), 1.0, 1e-15);
    const double h = 1e-5;
    EXPECT_NEAR((s.f(1 + h) - s.f(1 - h)) / (2 * h), 0.5, 1e-8);
}

TEST_P(EveryMean, SymmetryIdentity)
{
    const MeanDescriptor& s = GetParam();
    for (double x : log_grid(1e-3, 1e3, 61)) {
        EXPECT_NEAR(s.f(x), x * s.f(1.0 / x), 1e-10 * s.f(x)) << "x = " << x;
    }
}

TEST_P(EveryMean, IncreasingAndInvertible)
{
    const MeanDescriptor& s = GetParam();
    const auto grid = log_grid(1e-3, 1e3, 61);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        EXPECT_LT(s.f(grid[i - 1]), s.f(grid[i]));
    }
    for (double x : grid) {
        EXPECT_NEAR(s.f_inv(s.f(x)), x, 1e-9 * x) << "x = " << x;
    }
}

TEST_P(EveryMean, GeneratorVanishesToSecondOrderAtOne)
{
    const MeanDescriptor& s = GetParam();
    EXPECT_EQ(s.g(1.0), 0.0);
    EXPECT_NEAR(s.g_prime(1.0), 0.0, 1e-15);
    const double h = 1e-5;
    EXPECT_NEAR((s.g(1 + h) - 2 * s.g(1.0) + s.g(1 - h)) / (h * h), 2.0, 1e-6);
}

TEST_P(EveryMean, GeneratorDerivativeFormula)
{
    const MeanDescriptor& s = GetParam();
    for (double t : range_grid(s, 41)) {
        EXPECT_NEAR(s.g_prime(t), 1.0 - 1.0 / s.f_inv(t), 1e-9 * std::max(1.0, std::abs(s.g_prime(t))))
            << "t = " << t;
    }
}

TEST_P(EveryMean, GeneratorDerivativeStrictlyIncreasing)
{
    const MeanDescriptor& s = GetParam();
    const double lo = s.range().lo == 0.0 ? 1e-2 : s.range().lo * 1.001;
    const double hi = s.range().hi == kInf ? 1e2 : s.range().hi * 0.999;
    const auto grid = log_grid(lo, hi, 200);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double prev = s.g_prime(grid[i - 1]);
        const double cur = s.g_prime(grid[i]);
        // g' = 1 - 1/f^{-1} rounds to 1 once f^{-1} passes 1/eps; past that only monotonicity is visible
        if (1.0 - cur > 1e-12) {
            EXPECT_LT(prev, cur) << "t = " << grid[i];
        } else {
            EXPECT_LE(prev, cur) << "t = " << grid[i];
        }
    }
}

TEST_P(EveryMean, BetweenHarmonicAndArithmetic)
{
    const MeanDescriptor& s = GetParam();
    for (double x : log_grid(1e-3, 1e3, 61)) {
        EXPECT_LE(2 * x / (x + 1), s.f(x) * (1 + 1e-14));
        EXPECT_LE(s.f(x), (1 + x) / 2 * (1 + 1e-14));
    }
}

TEST_P(EveryMean, GeneratorMatchesIndependentQuadrature)
{
    const MeanDescriptor& s = GetParam();
    const oracle::Fn f = [&](double x) { return s.f(x); };
    for (double x : {0.6, 0.8, 0.95, 1.05, 1.3, 1.9}) {
        if (!s.range().contains(x)) {
            continue;
        }
        EXPECT_NEAR(s.g(x), oracle::scalar_g(f, x), 1e-10) << "x = " << x;
    }
}

TEST_P(EveryMean, RangeErrorsOutsideRange)
{
    const MeanDescriptor& s = GetParam();
    EXPECT_THROW((void)s.f_inv(0.0), RangeError);
    EXPECT_THROW((void)s.g(-1.0), RangeError);
    if (s.range().hi < kInf) {
        EXPECT_THROW((void)s.g(s.range().hi), RangeError);
    }
    if (s.range().lo > 0.0) {
        EXPECT_THROW((void)s.g_prime(s.range().lo), RangeError);
    }
}

TEST_P(EveryMean, MeanOfEqualMatricesIsTheMatrix)
{
    random::Engine rng(11);
    const PDMatrix a = random::pd(4, rng);
    EXPECT_LE(relative_difference(mean_apply(GetParam(), a, a), a), 1e-12);
}

TEST(InvertF, Examples)
{
    EXPECT_DOUBLE_EQ(invert_f(means::geometric(), 4.0), 16.0);
    for (const auto& s : builtin_means()) {
        EXPECT_EQ(invert_f(s, 1.0), 1.0) << s.name();
    }
    EXPECT_NEAR(invert_f(means::logarithmic(), std::numbers::e - 1.0), std::numbers::e, 1e-9);
}

TEST(InvertF, NumericInverseRelativeAccuracy)
{
    const MeanDescriptor lm = means::logarithmic();
    for (double x : log_grid(1e-6, 1e6, 25)) {
        EXPECT_NEAR(invert_f(lm, means::logarithmic_f(x)), x, 1e-12 * x) << "x = " << x;
    }
}

TEST(EvalG, Examples)
{
    for (const auto& s : builtin_means()) {
        EXPECT_EQ(eval_g(s, 1.0), 0.0);
    }
    EXPECT_NEAR(eval_g(means::geometric(), 2.0), 0.5, 1e-15);
    EXPECT_NEAR(eval_g(means::arithmetic(), 2.0), 1.0 - 0.5 * std::log(3.0), 1e-15);
    EXPECT_NEAR(eval_g(means::arithmetic(), 2.0), 0.4506938, 1e-7);
}

TEST(EvalG, LogarithmicReferenceValues)
{
    // 30-digit references computed offline with arbitrary-precision arithmetic
    const MeanDescriptor lm = means::logarithmic();
    EXPECT_NEAR(eval_g(lm, 0.3) / 2.567186, 1.0, 1e-6);
    EXPECT_NEAR(eval_g(lm, 0.7) / 0.135942, 1.0, 1e-5);
    EXPECT_NEAR(eval_g(lm, 0.05) / 1357389.37, 1.0, 1e-8);
}

TEST(EvalG, QuadratureMatchesGeometricClosedForm)
{
    const MeanDescriptor numeric = MeanDescriptor::from_function("sqrt", [](double x) { return std::sqrt(x); });
    EXPECT_FALSE(numeric.has_closed_g());
    for (double x : log_grid(1e-2, 1e2, 41)) {
        EXPECT_NEAR(numeric.g(x), x + 1 / x - 2, 1e-9 * std::max(1.0, x + 1 / x)) << "x = " << x;
    }
}

TEST(EvalG, LogarithmicSeriesBranchIsContinuous)
{
    for (double u : {9.9e-5, 1.0e-4, 1.01e-4}) {
        for (double sign : {-1.0, 1.0}) {
            const double x = 1.0 + sign * u;
            EXPECT_NEAR(means::logarithmic_f(x), oracle::f_logarithmic(x), 1e-13);
        }
    }
}

TEST(FromFunction, EstimatesRange)
{
    const MeanDescriptor geo = MeanDescriptor::from_function("sqrt", [](double x) { return std::sqrt(x); });
    EXPECT_TRUE(geo.surjective());
    EXPECT_TRUE(geo.range_estimated());
    const MeanDescriptor ar = MeanDescriptor::from_function("avg", [](double x) { return 0.5 * (1 + x); });
    EXPECT_FALSE(ar.surjective());
    EXPECT_NEAR(ar.range().lo, 0.5, 1e-8);
    const MeanDescriptor ha = MeanDescriptor::from_function("harm", [](double x) { return 2 * x / (1 + x); });
    EXPECT_FALSE(ha.surjective());
    EXPECT_NEAR(ha.range().hi, 2.0, 1e-8);
    // f(x) ~ 1/ln(1/x) near zero: slow, but unbounded below
    EXPECT_TRUE(MeanDescriptor::from_function("log", means::logarithmic_f).surjective());
}

TEST(Registry, SurjectiveFlags)
{
    EXPECT_FALSE(means::arithmetic().surjective());
    EXPECT_FALSE(means::harmonic().surjective());
    EXPECT_TRUE(means::geometric().surjective());
    EXPECT_TRUE(means::logarithmic().surjective());
    EXPECT_EQ(mean_by_name("logarithmic").name(), "logarithmic");
    EXPECT_THROW(mean_by_name("quadratic"), UnknownMean);
}

TEST(Adjoint, Examples)
{
    const MeanDescriptor geo_adj = adjoint_mean(means::geometric());
    const MeanDescriptor ar_adj = adjoint_mean(means::arithmetic());
    for (double x : log_grid(1e-3, 1e3, 31)) {
        EXPECT_NEAR(geo_adj.f(x), std::sqrt(x), 1e-12 * std::sqrt(x));
        EXPECT_NEAR(ar_adj.f(x), 2 * x / (1 + x), 1e-12);
        for (const auto& s : builtin_means()) {
            EXPECT_NEAR(adjoint_mean(adjoint_mean(s)).f(x), s.f(x), 1e-12 * s.f(x));
        }
    }
    EXPECT_EQ(ar_adj.range().lo, 0.0);
    EXPECT_EQ(ar_adj.range().hi, 2.0);
}

TEST(MeanApply, Examples)
{
    RVector d1(2);
    RVector d2(2);
    d1 << 1, 4;
    d2 << 4, 1;
    const PDMatrix g = mean_apply(means::geometric(), PDMatrix::diagonal(d1), PDMatrix::diagonal(d2));
    EXPECT_LE(relative_difference(g, HermitianMatrix(CMatrix(2.0 * CMatrix::Identity(2, 2)))), 1e-15);

    random::Engine rng(12);
    for (int k = 0; k < 10; ++k) {
        const PDMatrix a = random::pd(4, rng);
        const PDMatrix b = random::pd(4, rng);
        EXPECT_LE(relative_difference(mean_apply(means::geometric(), a, b), mean_apply(means::geometric(), b, a)),
                  1e-10);
        const PDMatrix root = sqrt(a);
        const HermitianMatrix explicit_form =
            congruence(root.matrix(), sqrt(conjugate_by_root(a, b, RootSign::minus_half)).hermitian());
        EXPECT_LE(relative_difference(mean_apply(means::geometric(), a, b), explicit_form), 1e-10);
    }
    EXPECT_THROW(mean_apply(means::geometric(), PDMatrix::identity(2), PDMatrix::identity(3)), DimensionMismatch);
}

TEST(MeanApply, EverySymmetricMeanIsSymmetric)
{
    random::Engine rng(13);
    const PDMatrix a = random::pd(3, rng);
    const PDMatrix b = random::pd(3, rng);
    for (const auto& s : builtin_means()) {
        EXPECT_LE(relative_difference(mean_apply(s, a, b), mean_apply(s, b, a)), 1e-9) << s.name();
    }
}

TEST(WeightedTwoMeans, Examples)
{
    random::Engine rng(14);
    const PDMatrix a = random::pd(3, rng);
    const PDMatrix b = random::pd(3, rng);
    EXPECT_LE(relative_difference(weighted_two_means(WeightedKind::geometric, a, b, 0.0), a), 1e-12);
    EXPECT_LE(relative_difference(weighted_two_means(WeightedKind::geometric, a, b, 1.0), b), 1e-12);
    EXPECT_NEAR(
        weighted_two_means(WeightedKind::harmonic, PDMatrix::scalar(1), PDMatrix::scalar(4), 0.5).hermitian()(0, 0).real(),
        1.6, 1e-15);
    RVector d1(2);
    RVector d2(2);
    d1 << 1, 2;
    d2 << 3, 6;
    RVector want(2);
    want << 1.5, 3;
    EXPECT_LE(relative_difference(
                  weighted_two_means(WeightedKind::arithmetic, PDMatrix::diagonal(d1), PDMatrix::diagonal(d2), 0.25),
                  PDMatrix::diagonal(want)),
              1e-15);
}

TEST(WeightedTwoMeans, RejectsAlphaOutsideUnitInterval)
{
    const PDMatrix a = PDMatrix::identity(2);
    EXPECT_THROW(weighted_two_means(WeightedKind::arithmetic, a, a, -0.1), WeightError);
    EXPECT_THROW(weighted_two_means(WeightedKind::harmonic, a, a, 1.5), WeightError);
    EXPECT_THROW(weighted_two_means(WeightedKind::geometric, a, a, std::nan("")), WeightError);
}
