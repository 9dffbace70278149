#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace opmean;

namespace {

SolverConfig from_arithmetic()
{
    SolverConfig cfg;
    cfg.init = InitStrategy::arithmetic;
    return cfg;
}

const std::vector<PDMatrix> kScalars{PDMatrix::scalar(1.0), PDMatrix::scalar(4.0)};

double scalar_of(const PDMatrix& x)
{
    return x.hermitian()(0, 0).real();
}

class SurjectiveMean : public ::testing::TestWithParam<std::string> {
protected:
    [[nodiscard]] const MeanDescriptor& sigma() const { return mean_by_name(GetParam()); }
};

} // namespace

INSTANTIATE_TEST_SUITE_P(Registry, SurjectiveMean, ::testing::Values("geometric", "logarithmic"));

TEST(BarycenterProblem, RefusesNonSurjectiveMeans)
{
    EXPECT_THROW(BarycenterProblem(means::arithmetic(), kScalars, WeightVector({0.5, 0.5})), NotSurjective);
    EXPECT_THROW(BarycenterProblem(means::harmonic(), kScalars, WeightVector({0.5, 0.5})), NotSurjective);
    EXPECT_NO_THROW(BarycenterProblem(means::logarithmic(), kScalars, WeightVector({0.5, 0.5})));
}

TEST(BarycenterProblem, ValidatesShapes)
{
    EXPECT_THROW(BarycenterProblem(means::geometric(), kScalars, WeightVector({1.0})), WeightError);
    EXPECT_THROW(BarycenterProblem(means::geometric(), {PDMatrix::identity(2), PDMatrix::identity(3)},
                                   WeightVector({0.5, 0.5})),
                 DimensionMismatch);
}

TEST(SolverConfig, Validation)
{
    SolverConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.armijo_c = 1.0;
    EXPECT_THROW(cfg.validate(), Error);
    cfg = {};
    cfg.backtrack_factor = 0.0;
    EXPECT_THROW(cfg.validate(), Error);
    cfg = {};
    cfg.init = InitStrategy::user;
    EXPECT_THROW(cfg.validate(), Error);
}

TEST(SolveBarycenter, ScalarExamples)
{
    const SolveReport half = solve_barycenter(means::geometric(), kScalars, WeightVector({0.5, 0.5}), from_arithmetic());
    EXPECT_NEAR(scalar_of(half.X), 2.0, 1e-9);

    const SolveReport skew =
        solve_barycenter(means::geometric(), kScalars, WeightVector({0.75, 0.25}), from_arithmetic());
    EXPECT_NEAR(scalar_of(skew.X), 1.4675988, 1e-7);
    const double h = 1.0 / (0.75 + 0.0625);
    EXPECT_NEAR(scalar_of(skew.X), std::sqrt(h * 1.75), 1e-9);

    // independent oracle: golden-section minimization of the scalar loss
    const double ref = oracle::golden_section(
        [](double x) { return oracle::scalar_loss([](double y) { return y + 1 / y - 2; }, {1, 4}, {0.75, 0.25}, x); },
        1.0, 4.0);
    EXPECT_NEAR(scalar_of(skew.X), ref, 1e-7);
}

TEST(SolveBarycenter, SingleMatrixShortCircuits)
{
    random::Engine rng(41);
    const PDMatrix a = random::pd(4, rng);
    const SolveReport r = solve_barycenter(means::logarithmic(), {a}, WeightVector({1.0}));
    EXPECT_EQ(r.iterations, 0);
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(relative_difference(r.X, a), 0.0);
}

TEST(SolveBarycenter, ReportsMaxItersWithoutThrowing)
{
    random::Engine rng(42);
    const auto mats = fixtures::random_set(4, 3, rng);
    SolverConfig cfg = from_arithmetic();
    cfg.max_iters = 2;
    const SolveReport r = solve_barycenter(means::logarithmic(), mats, WeightVector::uniform(3), cfg);
    EXPECT_FALSE(r.converged);
    EXPECT_EQ(r.status, SolveStatus::max_iters_exceeded);
    EXPECT_EQ(r.iterations, 2);
    EXPECT_GT(r.final_grad_norm, r.grad_threshold);
}

TEST(SolveBarycenter, LineSearchStallCarriesReport)
{
    // A generator that is undefined away from 1 with a gradient that never vanishes:
    // no trial step can be accepted.
    const MeanDescriptor broken("broken", [](double x) { return std::sqrt(x); }, Interval::positive(),
                                {.f_inv = [](double t) { return t * t; },
                                 .g = [](double x) { return x == 1.0 ? 0.0 : std::nan(""); },
                                 .g_prime = [](double) { return 1.0; }});
    random::Engine rng(43);
    const PDMatrix a = random::pd(3, rng);
    try {
        (void)solve_barycenter(broken, {a, a}, WeightVector::uniform(2), from_arithmetic());
        ADD_FAILURE() << "expected LineSearchStalled";
    } catch (const LineSearchStalled& e) {
        EXPECT_EQ(e.report().status, SolveStatus::line_search_stalled);
        EXPECT_FALSE(e.report().converged);
    }
}

TEST(SolveBarycenter, UserInitialization)
{
    random::Engine rng(44);
    const auto mats = fixtures::random_set(3, 3, rng);
    const WeightVector w = fixtures::random_weights(3, rng);
    SolverConfig cfg;
    cfg.init = InitStrategy::user;
    cfg.user_init = random::pd(3, rng);
    const SolveReport r = solve_barycenter(means::geometric(), mats, w, cfg);
    EXPECT_TRUE(r.converged);
    EXPECT_LE(relative_difference(r.X, geometric_closed_form(mats, w)), 1e-7);
}

TEST_P(SurjectiveMean, ConvergesWithDecreasingLoss)
{
    random::Engine rng(45);
    for (int k = 0; k < 5; ++k) {
        const auto mats = fixtures::random_set(2 + k, 2 + static_cast<std::size_t>(k % 3), rng);
        const WeightVector w = fixtures::random_weights(mats.size(), rng);
        const BarycenterProblem p(sigma(), mats, w);
        const SolveReport r = solve_barycenter(p, from_arithmetic());
        ASSERT_TRUE(r.converged);
        EXPECT_LE(r.final_grad_norm, r.grad_threshold);
        EXPECT_LE(critical_point_residual(p, r.X), r.grad_threshold);
        for (std::size_t i = 1; i < r.loss_trace.size(); ++i) {
            EXPECT_LE(r.loss_trace[i], r.loss_trace[i - 1] + 1e-14 * std::abs(r.loss_trace[i - 1]));
        }
        EXPECT_TRUE(harmonic_lower_bound_check(p, r.X));
    }
}

TEST_P(SurjectiveMean, RestartsAgree)
{
    random::Engine rng(46);
    const auto mats = fixtures::random_set(4, 3, rng);
    const WeightVector w = fixtures::random_weights(3, rng);
    const PDMatrix a = solve_barycenter(sigma(), mats, w, from_arithmetic()).X;
    for (int k = 0; k < 3; ++k) {
        SolverConfig cfg;
        cfg.init = InitStrategy::user;
        cfg.user_init = random::pd(4, rng, 1e2);
        EXPECT_LE(relative_difference(solve_barycenter(sigma(), mats, w, cfg).X, a), 1e-7);
    }
}

TEST_P(SurjectiveMean, TwoMatrixBarycenterIsTheMean)
{
    random::Engine rng(47);
    for (int k = 0; k < 5; ++k) {
        const PDMatrix a = random::pd(3, rng);
        const PDMatrix b = random::pd(3, rng);
        const SolveReport r = solve_barycenter(sigma(), {a, b}, WeightVector({0.5, 0.5}), from_arithmetic());
        EXPECT_LE(relative_difference(r.X, mean_apply(sigma(), a, b)), 1e-7);
    }
}

TEST_P(SurjectiveMean, ElementaryProperties)
{
    random::Engine rng(48);
    const auto mats = fixtures::random_set(3, 3, rng, 1e2);
    const WeightVector w = fixtures::random_weights(3, rng);
    const PDMatrix x = solve_barycenter(sigma(), mats, w, from_arithmetic()).X;

    const std::vector<PDMatrix> same(3, mats[1]);
    EXPECT_LE(relative_difference(solve_barycenter(sigma(), same, w, from_arithmetic()).X, mats[1]), 1e-7);

    for (double t : {0.1, 2.0, 10.0}) {
        std::vector<PDMatrix> scaled;
        for (const auto& a : mats) {
            scaled.emplace_back(HermitianMatrix(CMatrix(t * a.matrix())));
        }
        EXPECT_LE(relative_difference(solve_barycenter(sigma(), scaled, w, from_arithmetic()).X,
                                      HermitianMatrix(CMatrix(t * x.matrix()))),
                  1e-7);
    }

    const std::vector<PDMatrix> perm{mats[2], mats[0], mats[1]};
    const WeightVector pw({w[2], w[0], w[1]});
    EXPECT_LE(relative_difference(solve_barycenter(sigma(), perm, pw, from_arithmetic()).X, x), 1e-7);

    const CMatrix t = random::invertible(3, rng);
    std::vector<PDMatrix> moved;
    for (const auto& a : mats) {
        moved.push_back(congruence(t, a));
    }
    EXPECT_LE(relative_difference(solve_barycenter(sigma(), moved, w, from_arithmetic()).X,
                                  congruence(t, x.hermitian())),
              1e-7);
}

TEST_P(SurjectiveMean, LossIsConvexAlongSegments)
{
    random::Engine rng(49);
    const auto mats = fixtures::random_set(3, 3, rng, 10.0);
    const WeightVector w = fixtures::random_weights(3, rng);
    for (int k = 0; k < 5; ++k) {
        const PDMatrix x = random::pd(3, rng, 10.0);
        const PDMatrix y = random::pd(3, rng, 10.0);
        const double qx = loss_Q(sigma(), mats, w, x).value();
        const double qy = loss_Q(sigma(), mats, w, y).value();
        for (double t : {0.25, 0.5, 0.75}) {
            const PDMatrix z = weighted_two_means(WeightedKind::arithmetic, x, y, t);
            EXPECT_LE(loss_Q(sigma(), mats, w, z).value(), (1 - t) * qx + t * qy + 1e-10);
        }
    }
}

TEST_P(SurjectiveMean, CommutingProblemsMatchGoldenSection)
{
    random::Engine rng(50);
    const oracle::Fn f = oracle::representing_function(GetParam());
    const oracle::Fn g = [f](double x) { return oracle::scalar_g(f, x); };
    std::vector<PDMatrix> mats;
    for (int j = 0; j < 3; ++j) {
        mats.push_back(random::diagonal_pd(2, rng, 5.0));
    }
    const WeightVector w = fixtures::random_weights(3, rng);
    const PDMatrix x = solve_barycenter(sigma(), mats, w, from_arithmetic()).X;
    EXPECT_LE(std::abs(x.hermitian()(0, 1)), 1e-10);
    for (Index i = 0; i < 2; ++i) {
        std::vector<double> ai;
        for (const auto& a : mats) {
            ai.push_back(a.hermitian()(i, i).real());
        }
        const double ref = oracle::golden_section([&](double s) { return oracle::scalar_loss(g, ai, w.values(), s); },
                                                  0.5, 10.0);
        EXPECT_NEAR(x.hermitian()(i, i).real() / ref, 1.0, 1e-6);
    }
}

TEST(GeometricClosedForm, Examples)
{
    random::Engine rng(51);
    const PDMatrix a = random::pd(3, rng);
    EXPECT_LE(relative_difference(geometric_closed_form({a}, WeightVector({1.0})), a), 1e-12);
    EXPECT_NEAR(scalar_of(geometric_closed_form(kScalars, WeightVector({0.75, 0.25}))), 1.4675988, 1e-7);
    EXPECT_THROW(geometric_closed_form({}, WeightVector({1.0})), DimensionMismatch);
}

TEST(GeometricClosedForm, SatisfiesRiccatiEquation)
{
    random::Engine rng(52);
    for (int k = 0; k < 10; ++k) {
        const auto mats = fixtures::random_set(4, 3, rng);
        const WeightVector w = fixtures::random_weights(3, rng);
        const PDMatrix x = geometric_closed_form(mats, w);
        const PDMatrix h_inv = inverse(weighted_harmonic_mean(mats, w));
        const PDMatrix m = weighted_arithmetic_mean(mats, w);
        const CMatrix lhs = x.matrix() * h_inv.matrix() * x.matrix();
        EXPECT_LE(CMatrix(lhs - m.matrix()).norm(), 1e-9 * frobenius_norm(m.hermitian()));
    }
}

TEST(GeometricClosedForm, MatchesSolver)
{
    random::Engine rng(53);
    for (int k = 0; k < 10; ++k) {
        const auto mats = fixtures::random_set(2 + k % 5, 2 + static_cast<std::size_t>(k % 4), rng);
        const WeightVector w = fixtures::random_weights(mats.size(), rng);
        const SolveReport r = solve_barycenter(means::geometric(), mats, w, from_arithmetic());
        EXPECT_LE(relative_difference(r.X, geometric_closed_form(mats, w)), 1e-7);
    }
}

TEST(TwoPointGeometric, Examples)
{
    const PDMatrix one = PDMatrix::scalar(1.0);
    const PDMatrix four = PDMatrix::scalar(4.0);
    EXPECT_NEAR(scalar_of(two_point_geometric_weighted(one, four, 0.5)), 2.0, 1e-14);
    EXPECT_NEAR(scalar_of(two_point_geometric_weighted(one, four, 0.0)), 1.0, 1e-14);
    EXPECT_NEAR(scalar_of(two_point_geometric_weighted(one, four, 0.25)), 1.4675988, 1e-7);
    EXPECT_THROW(two_point_geometric_weighted(one, four, 1.5), WeightError);
}

TEST(TwoPointGeometric, IsAKuboAndoMean)
{
    random::Engine rng(54);
    for (double alpha : {0.1, 0.25, 0.5, 0.9}) {
        const PDMatrix a = random::pd(3, rng);
        const PDMatrix b = random::pd(3, rng);
        const PDMatrix km =
            apply_representing_function([alpha](double x) { return two_point_geometric_representing(x, alpha); }, a, b);
        EXPECT_LE(relative_difference(two_point_geometric_weighted(a, b, alpha), km), 1e-9);
        const SolveReport r =
            solve_barycenter(means::geometric(), {a, b}, WeightVector({1 - alpha, alpha}), from_arithmetic());
        EXPECT_LE(relative_difference(r.X, km), 1e-8);
    }
}

TEST(HarmonicLowerBound, SingleMatrixIsTight)
{
    random::Engine rng(55);
    const PDMatrix a = random::pd(3, rng);
    const BarycenterProblem p(means::geometric(), {a}, WeightVector({1.0}));
    EXPECT_TRUE(harmonic_lower_bound_check(p, a));
    EXPECT_FALSE(harmonic_lower_bound_check(p, PDMatrix(HermitianMatrix(CMatrix(0.9 * a.matrix())))));
}
