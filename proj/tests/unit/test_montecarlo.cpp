#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "gauss_extrema/montecarlo.hpp"

using namespace gx;

TEST(ProbabilityMc, ConstantTrue) {
    const auto r = run_probability_mc([](Rng&, std::uint64_t) { return true; }, {.n_reps = 1000, .seed = 1});
    EXPECT_EQ(r.estimate, 1.0);
    EXPECT_EQ(r.std_error, 0.0);
    EXPECT_EQ(r.n_success, 1000u);
    EXPECT_EQ(r.ci_hi, 1.0);
}

TEST(ProbabilityMc, ZeroSuccessUsesExactInterval) {
    const auto r = run_probability_mc([](Rng&, std::uint64_t) { return false; }, {.n_reps = 1000, .seed = 1});
    EXPECT_EQ(r.estimate, 0.0);
    EXPECT_TRUE(r.has_flag("zero_success"));
    // Clopper-Pearson upper bound 1 - (alpha/2)^{1/n}.
    EXPECT_NEAR(r.ci_hi, 1.0 - std::pow(0.025, 1.0 / 1000.0), 1e-12);
}

TEST(ProbabilityMc, FairCoin) {
    const auto r = run_probability_mc([](Rng& rng, std::uint64_t) { return uniform01(rng) < 0.5; },
                                      {.n_reps = 100000, .seed = 2});
    EXPECT_NEAR(r.estimate, 0.5, 4 * 0.5 / std::sqrt(1e5));
    EXPECT_NEAR(r.std_error, 0.5 / std::sqrt(1e5), 1e-5);
}

TEST(ProbabilityMc, DeterministicAcrossWorkers) {
    auto sampler = [](Rng& rng, std::uint64_t) { return uniform01(rng) < 0.3; };
    const auto a = run_probability_mc(sampler, {.n_reps = 20000, .seed = 3, .workers = 1});
    const auto b = run_probability_mc(sampler, {.n_reps = 20000, .seed = 3, .workers = 2});
    const auto c = run_probability_mc(sampler, {.n_reps = 20000, .seed = 3, .workers = 8});
    EXPECT_EQ(a.n_success, b.n_success);
    EXPECT_EQ(a.n_success, c.n_success);
    const auto d = run_probability_mc(sampler, {.n_reps = 20000, .seed = 4, .workers = 1});
    EXPECT_NE(a.n_success, d.n_success);

    auto value = [](Rng& rng, std::uint64_t) { return std_normal(rng); };
    const auto m1 = run_mean_mc(value, {.n_reps = 5000, .seed = 3, .workers = 1});
    const auto m8 = run_mean_mc(value, {.n_reps = 5000, .seed = 3, .workers = 8});
    EXPECT_EQ(m1.estimate, m8.estimate);
    EXPECT_EQ(m1.std_error, m8.std_error);
}

TEST(ProbabilityMc, CoverageOfInterval) {
    const double p = 0.3;
    int covered = 0;
    const int reps = 200;
    for (int k = 0; k < reps; ++k) {
        const auto r = run_probability_mc([p](Rng& rng, std::uint64_t) { return uniform01(rng) < p; },
                                          {.n_reps = 2000, .seed = 1000u + k});
        if (r.ci_lo <= p && p <= r.ci_hi) ++covered;
    }
    // Binomial(200, 0.95): mean 190, sd about 3.1.
    EXPECT_GE(covered, 178);
}

TEST(MeanMc, KnownMean) {
    const auto r = run_mean_mc([](Rng& rng, std::uint64_t) { return uniform01(rng); }, {.n_reps = 50000, .seed = 5});
    EXPECT_NEAR(r.estimate, 0.5, 4 * std::sqrt(1.0 / 12.0 / 5e4));
    EXPECT_NEAR(r.std_error, std::sqrt(1.0 / 12.0 / 5e4), 2e-5);
    EXPECT_NEAR(r.ci_hi - r.estimate, 1.959963984540054 * r.std_error, 1e-12);
}

TEST(Mc, ErrorCarriesReplicationIndex) {
    auto bad = [](Rng&, std::uint64_t i) -> bool {
        if (i == 1500 || i == 7000) throw DomainError("boom");
        return false;
    };
    for (unsigned w : {1u, 4u}) {
        try {
            run_probability_mc(bad, {.n_reps = 10000, .seed = 1, .workers = w});
            FAIL() << "no throw";
        } catch (const DomainError& e) {
            EXPECT_NE(std::string(e.what()).find("replication 1500"), std::string::npos) << e.what();
        }
    }
    EXPECT_THROW(run_probability_mc(bad, {.n_reps = 0}), DomainError);
}

TEST(Mc, StreamsDiffer) {
    EXPECT_NE(stream_seed(1, 0), stream_seed(1, 1));
    EXPECT_NE(stream_seed(1, 0), stream_seed(2, 0));
    EXPECT_NE(stream_seed(1, 0, 1), stream_seed(1, 0, 2));
    EXPECT_EQ(stream_seed(9, 9, 9), stream_seed(9, 9, 9));
}
