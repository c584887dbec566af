#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "flocsim/analysis_multi.hpp"
#include "oracles.hpp"

using namespace flocsim;
using namespace flocsim::multi;

namespace {

// Three-species fixture of scenarios/paper_fig4_demo.json.
MultiSpeciesModel fixture_full(double epsilon = 0.01) {
    MultiSpeciesModel m;
    m.D = 1.0;
    m.S_in = 0.95;
    m.f = {GrowthLaw::monod(2.0, 0.2), GrowthLaw::monod(2.0, 0.3), GrowthLaw::monod(2.0, 0.4)};
    m.g = {GrowthLaw::monod(1.0, 0.8), GrowthLaw::monod(1.0, 1.2), GrowthLaw::monod(1.0, 1.0)};
    m.D0 = {1.0, 1.0, 1.0};
    m.D1 = {0.5, 0.5, 0.5};
    m.A = Eigen::MatrixXd::Zero(3, 3);
    m.A.diagonal() << 4.0, 3.0, 5.0;
    m.b = {1.0, 1.0, 1.0};
    m.epsilon = epsilon;
    return m;
}

DiagonalMultiModel fixture() { return DiagonalMultiModel(MultiReducedModel(fixture_full())); }

// Frozen from tests/oracles/multi_species_oracle.py.
constexpr double kSStar = 0.41121544975925656;
constexpr double kXStar[] = {0.5382868455011788, 0.21294522360409093, 0.013254928491676697};
constexpr double kCriterion = -0.06082251082251122;

FullModel single_species(double s_in) {
    FullModel m;
    m.D = 1.0;
    m.S_in = s_in;
    m.D0 = 1.0;
    m.D1 = 0.5;
    m.f = GrowthLaw::monod(2.0, 1.0);
    m.g = GrowthLaw::monod(1.5, 3.0);
    m.kinetics = kinetics::TotalDensity{4.0, 1.0};
    return m;
}

} // namespace

TEST(MultiModel, BreakEvenExtremes) {
    const auto m = fixture();
    EXPECT_EQ(m.species(), 3u);
    EXPECT_NEAR(m.lambda0_max().value(), 0.4, 1e-12);
    EXPECT_NEAR(m.lambda1_min().value(), 0.8, 1e-12);
}

TEST(MultiModel, OffDiagonalAttachmentIsRejected) {
    auto full = fixture_full();
    full.A(0, 1) = 0.5;
    EXPECT_THROW(DiagonalMultiModel(MultiReducedModel(full)), PreconditionError);
}

TEST(MultiModel, SpeciesMustShareTheChemostat) {
    std::vector<ReducedModel> sp{ReducedModel(single_species(1.0)), ReducedModel(single_species(2.0))};
    EXPECT_THROW(DiagonalMultiModel(std::move(sp)), ConfigError);
}

TEST(BalanceBiomass, ZeroAtLowerThresholdAndIncreasing) {
    const auto m = fixture();
    for (std::size_t i = 0; i < 3; ++i) {
        const double l0 = m.break_even(i).lambda0.value(), l1 = m.break_even(i).lambda1.value();
        EXPECT_EQ(X(m, i, l0), 0.0);
        EXPECT_EQ(X(m, i, 0.5 * l0), 0.0);
        double prev = 0.0;
        for (int k = 1; k < 200; ++k) {
            const double s = l0 + (l1 - l0) * k / 200.0;
            const double x = X(m, i, s);
            EXPECT_GT(x, prev);
            const auto& r = m.species_model(i);
            EXPECT_NEAR(r.growth(s, x), r.removal(x), 1e-10);
            prev = x;
        }
        EXPECT_THROW(X(m, i, l1), DomainError);
        EXPECT_THROW(X(m, i, l1 + 0.1), DomainError);
    }
}

TEST(BalanceBiomass, HIdentity) {
    const auto m = fixture();
    for (double s : {0.1, 0.45, 0.6, 0.79}) {
        double sum = 0.0;
        for (std::size_t i = 0; i < 3; ++i) {
            const double x = X(m, i, s);
            const auto& r = m.species_model(i);
            EXPECT_NEAR(h(m, i, s), r.growth(s, x) * x, 1e-14);
            EXPECT_NEAR(h(m, i, s), r.removal(x) * x, 1e-10);
            sum += h(m, i, s);
        }
        EXPECT_NEAR(H(m, s), sum - (0.95 - s), 1e-14);
    }
}

TEST(BalanceBiomass, HIncreasingOnTheAdmissibleInterval) {
    const auto m = fixture();
    double prev = H(m, 0.0);
    for (int k = 1; k < 1024; ++k) {
        const double now = H(m, 0.8 * k / 1024.0);
        EXPECT_GT(now, prev);
        prev = now;
    }
}

TEST(Hypotheses, FixtureSatisfiesAll) {
    const auto rep = check_multi_hypotheses(fixture());
    EXPECT_TRUE(rep.holds());
    EXPECT_TRUE(rep.h9);
    ASSERT_EQ(rep.ordered.size(), 3u);
    for (bool o : rep.ordered) EXPECT_TRUE(o);
}

TEST(Hypotheses, ViolationsNameTheSpecies) {
    auto full = fixture_full();
    full.g[1] = full.f[1];
    const auto rep = check_multi_hypotheses(DiagonalMultiModel(MultiReducedModel(full)));
    EXPECT_FALSE(rep.holds());
    bool found = false;
    for (const auto& line : rep.violations()) found |= line.find("species 2") != std::string::npos;
    EXPECT_TRUE(found);
    EXPECT_THROW(solve_positive_equilibrium(DiagonalMultiModel(MultiReducedModel(full))), PreconditionError);
}

TEST(Equilibrium, FixtureMatchesOracle) {
    const auto eq = solve_positive_equilibrium(fixture());
    ASSERT_TRUE(eq.has_value());
    EXPECT_NEAR(eq->S_star, kSStar, 1e-10);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(eq->x_star[i], kXStar[i], 1e-9);
    EXPECT_NEAR(eq->criterion, kCriterion, 1e-12);
    EXPECT_LE(std::abs(H(fixture(), eq->S_star)), 1e-10);
    EXPECT_LE(eq->mass_residual, 1e-9);
    EXPECT_LE(eq->growth_residual, 1e-9);
    EXPECT_TRUE(eq->stable);
    for (const auto& l : eq->eigenvalues) EXPECT_LT(l.real(), 0.0);
}

TEST(Equilibrium, JacobianMatchesFiniteDifferences) {
    const auto m = fixture();
    const auto eq = solve_positive_equilibrium(m);
    ASSERT_TRUE(eq.has_value());
    const MultiReducedModel r(fixture_full());
    std::vector<double> y{eq->S_star};
    y.insert(y.end(), eq->x_star.begin(), eq->x_star.end());
    const double hstep = 1e-6;
    for (std::size_t j = 0; j < y.size(); ++j) {
        auto yp = y, ym = y;
        yp[j] += hstep;
        ym[j] -= hstep;
        std::vector<double> fp(y.size()), fm(y.size());
        r.rhs_vec(yp, fp);
        r.rhs_vec(ym, fm);
        for (std::size_t i = 0; i < y.size(); ++i)
            EXPECT_NEAR(eq->jacobian(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)),
                        (fp[i] - fm[i]) / (2 * hstep), 1e-7)
                << i << "," << j;
    }
}

TEST(Equilibrium, EqualityCaseHasNoPositiveEquilibrium) {
    // S_in = lambda0 makes H(lambda0) = 0 exactly.
    std::vector<ReducedModel> sp{ReducedModel(single_species(1.0))};
    const DiagonalMultiModel m(std::move(sp));
    EXPECT_EQ(H(m, 1.0), 0.0);
    EXPECT_FALSE(solve_positive_equilibrium(m, true).has_value());
}

TEST(Equilibrium, SingleSpeciesAgreesWithSingleAnalysis) {
    const FullModel fm = single_species(2.0);
    const ReducedModel r(fm);
    const auto rep = single::find_equilibria(r);
    ASSERT_EQ(rep.positive_count(), 1u);
    const DiagonalMultiModel m(std::vector<ReducedModel>{r});
    const auto eq = solve_positive_equilibrium(m);
    ASSERT_TRUE(eq.has_value());
    EXPECT_NEAR(eq->S_star, rep.equilibria[1].S, 1e-9);
    EXPECT_NEAR(eq->x_star[0], rep.equilibria[1].x, 1e-9);
}

TEST(Equilibrium, FullModelConvergesNearReducedEquilibrium) {
    const auto full = fixture_full(1e-3);
    const auto eq = solve_positive_equilibrium(fixture());
    ASSERT_TRUE(eq.has_value());
    MultiState init{0.95, {0.1, 0.1, 0.1}, {0.1, 0.1, 0.1}};
    const auto traj = numerics::integrate(
        [&](double, std::span<const double> y, std::span<double> dy) { rhs_multi_vec(full, y, dy); },
        init.pack(), 0.0, 200.0);
    const auto end = MultiState::unpack(traj.back(), 3);
    EXPECT_LE(std::abs(end.S - eq->S_star), 0.05);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_LE(std::abs(end.u[i] + end.v[i] - eq->x_star[i]), 0.05);
}

TEST(Arrowhead, MatrixLayout) {
    const auto J = arrowhead_matrix({1.0, 2.0}, {3.0, 4.0}, {-1.0, 0.5}, 0.7);
    Eigen::MatrixXd expected(3, 3);
    expected << -0.7 - 3.0, -1.0, 0.5, 1.0, -3.0, 0.0, 2.0, 0.0, -4.0;
    EXPECT_TRUE(J.isApprox(expected, 1e-15));
}

TEST(Arrowhead, RandomAdmissibleMatricesAreStable) {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + rng() % 10;
        std::vector<double> a(n), b(n), c(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = 3.0 * U(rng);
            b[i] = 0.05 + 3.0 * U(rng);
            c[i] = b[i] - 5.0 * U(rng);
        }
        const double D = 0.05 + 2.0 * U(rng);
        EXPECT_TRUE(arrowhead_stability(a, b, c, D));
        const auto J = arrowhead_matrix(a, b, c, D);
        const auto roots = oracle::polynomial_roots(oracle::characteristic_polynomial(J));
        double max_re = -INFINITY;
        for (const auto& z : roots) max_re = std::max(max_re, z.real());
        EXPECT_LT(max_re, 0.0);
        // Polynomial roots lose accuracy for clustered spectra at larger n.
        if (n > 4) continue;
        const auto ours = numerics::eigenvalues(J);
        const std::vector<oracle::Complex> ours_c(ours.begin(), ours.end());
        EXPECT_LT(oracle::set_distance(ours_c, roots), 1e-6 * (1.0 + J.norm()));
    }
}

TEST(Arrowhead, StoredCounterexample) {
    EXPECT_FALSE(arrowhead_stability({1.0}, {1.0}, {3.0}, 1.0));
    const auto ev = numerics::eigenvalues(arrowhead_matrix({1.0}, {1.0}, {3.0}, 1.0));
    double max_re = -INFINITY;
    for (const auto& z : ev) max_re = std::max(max_re, z.real());
    EXPECT_GE(max_re, 0.0);
}

TEST(HCurves, CsvShapeAndRange) {
    const auto curves = h_curves(fixture(), 64);
    ASSERT_EQ(curves.S.size(), 64u);
    EXPECT_EQ(curves.S.front(), 0.0);
    EXPECT_LT(curves.S.back(), 0.8);
    ASSERT_EQ(curves.h.size(), 3u);
    const auto csv = curves.to_csv();
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "S,h_1,h_2,h_3,H");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 65);
}
