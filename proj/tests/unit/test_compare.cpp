#include <gtest/gtest.h>

#include <cmath>

#include "gauss_extrema/compare.hpp"
#include "gauss_extrema/errors.hpp"

using namespace gx;

namespace {

InfiniteHorizonProblem brownian_negative(double step, PsiMode mode) {
    DiekerOptions d;
    d.psi_mode = mode;
    return InfiniteHorizonProblem(VarianceProfile::fbm(0.5), 1.0, GridPolicy{step, 16, std::size_t{1} << 18},
                                  brownian_pickands(), d, InfiniteHorizonProblem::Formula::Dieker);
}

RatioOptions ratio_opts(std::uint64_t n, std::uint64_t seed) {
    RatioOptions o;
    o.mc.n_reps = n;
    o.mc.seed = seed;
    return o;
}

}  // namespace

TEST(RatioTable, EmptyAndUnsortedGrid) {
    auto p = brownian_negative(1.0 / 64, PsiMode::Exact);
    EXPECT_TRUE(ratio_table(p, {}, ratio_opts(1000, 1)).empty());
    const std::vector<double> bad{1.0, 1.0};
    EXPECT_THROW(ratio_table(p, bad, ratio_opts(1000, 1)), ConfigError);
}

TEST(RatioTable, InfeasibleRowIsFlagged) {
    auto p = brownian_negative(1.0 / 16, PsiMode::Exact);
    const std::vector<double> u{10.0};
    const auto rows = ratio_table(p, u, ratio_opts(1000, 2));
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_TRUE(rows[0].has_flag("infeasible"));
    EXPECT_FALSE(rows[0].mc.has_value());
    EXPECT_TRUE(rows[0].formula.has_value());
    EXPECT_FALSE(rows[0].has_ratio());
}

TEST(RatioTable, MissingFormulaIsFlagged) {
    // No Pickands constant for H = 0.7 under the Brownian provider.
    InfiniteHorizonProblem p(VarianceProfile::fbm(0.7), 1.0, GridPolicy{1.0 / 16, 16, 1 << 16}, brownian_pickands(), {},
                             InfiniteHorizonProblem::Formula::Corollary);
    const std::vector<double> u{0.5};
    const auto rows = ratio_table(p, u, ratio_opts(1000, 3));
    EXPECT_TRUE(rows[0].has_flag("formula_unavailable"));
    EXPECT_TRUE(rows[0].mc.has_value());
    EXPECT_FALSE(rows[0].has_ratio());
}

TEST(RatioTable, BrownianNegativeDriftTrend) {
    auto p = brownian_negative(1.0 / 256, PsiMode::Exact);
    const std::vector<double> u{0.5, 1.0, 1.5, 2.0};
    const auto rows = ratio_table(p, u, ratio_opts(10000, 4));
    ASSERT_EQ(rows.size(), u.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        ASSERT_TRUE(rows[k].has_ratio());
        EXPECT_LE(rows[k].ratio_lo, rows[k].ratio);
        EXPECT_GE(rows[k].ratio_hi, rows[k].ratio);
        if (k == 0) continue;
        const double slack = (rows[k].ratio_hi - rows[k].ratio_lo + rows[k - 1].ratio_hi - rows[k - 1].ratio_lo) / 2;
        EXPECT_LE(std::abs(rows[k].ratio - 1), std::abs(rows[k - 1].ratio - 1) + slack) << u[k];
    }
}

TEST(RatioTable, PositiveDriftParetoHorizon) {
    // P(sup_{[0,T]} B(t) + t > u) against P(T > u), alpha = 1.5.
    const double alpha = 1.5;
    ProblemSpec spec({DriftedProcessSpec{VarianceProfile::fbm(0.5), 1.0, 1.0}},
                     RegVarSampler{LimitingMeasure::axes(1, alpha, Norm::L1), 1.0});
    HorizonProblem p(spec, GridPolicy{1.0 / 64, 16, 1 << 18}, {});
    const std::vector<double> u{10.0, 40.0};
    const auto rows = ratio_table(p, u, ratio_opts(50000, 5));
    const auto& last = rows.back();
    ASSERT_TRUE(last.has_ratio());
    EXPECT_GE(last.mc->n_success, 100u);
    EXPECT_NEAR(last.formula->value, std::pow(40.0, -alpha), 1e-12);
    EXPECT_GE(last.ratio, 0.8);
    EXPECT_LE(last.ratio, 1.25);
}

TEST(RestrictedInterval, DominatedByNeighbourhoodOfOptimum) {
    // Brownian, c = 1: t* = 1, optimum near t = u.
    const double u = 3.0;
    const double step = 1.0 / 64;
    const double full = 8 * u + 16;
    const auto n = static_cast<std::size_t>(full / step);
    std::uint64_t hit_full = 0;
    std::uint64_t hit_up = 0;
    std::uint64_t hit_low = 0;
    const std::uint64_t reps = 40000;
    std::vector<double> path;
    for (std::uint64_t r = 0; r < reps; ++r) {
        Rng rng = make_rng(6, r);
        path.assign(n + 1, 0.0);
        add_profile_path(VarianceProfile::fbm(0.5), step, path, rng);
        const auto prefix = [&](double t) {
            return sup_drifted(std::span<const double>(path.data(), static_cast<std::size_t>(t / step) + 1), step, -1.0);
        };
        if (prefix(full) > u) ++hit_full;
        if (prefix(3 * u) > u) ++hit_up;
        if (prefix(0.5 * u) > u) ++hit_low;
    }
    ASSERT_GE(hit_full, 50u);
    const double rel_se = 1 / std::sqrt(static_cast<double>(hit_full));
    EXPECT_NEAR(static_cast<double>(hit_up) / hit_full, 1.0, 4 * rel_se);
    EXPECT_LT(static_cast<double>(hit_low) * u, static_cast<double>(hit_full));
}
