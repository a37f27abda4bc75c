#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "gmeval/divergence.hpp"
#include "test_support.hpp"

using namespace gmeval;

namespace {

double normal_logpdf(double x, double mu) { return -0.5 * std::log(2.0 * std::numbers::pi) - 0.5 * (x - mu) * (x - mu); }

LogLikelihoodTable gaussian_table(SampleSource src, double sample_mean, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> gt_col, model_col;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = sample_mean + rng.normal();
        gt_col.push_back(normal_logpdf(x, 0.0));
        model_col.push_back(normal_logpdf(x, 1.0));
    }
    return LogLikelihoodTable::from_columns(std::move(src), {{"ground-truth", gt_col}, {"m", model_col}});
}

// Probability of a full sequence, computed from the tables without the model's
// own context helper.
double sequence_prob(const CategoricalARModel& m, const std::vector<int>& seq) {
    double p = 1.0;
    for (std::size_t t = 0; t < seq.size(); ++t) {
        const std::size_t start = t > m.order() ? t - m.order() : 0;
        std::size_t ctx = 0;
        for (std::size_t j = start; j < t; ++j) ctx = ctx * m.alphabet() + static_cast<std::size_t>(seq[j]);
        p *= m.tables()[t](static_cast<Eigen::Index>(ctx), seq[t]);
    }
    return p;
}

// Iterates all V^L sequences in odometer order.
template <class F>
void for_each_sequence(std::size_t v, std::size_t l, F&& f) {
    std::vector<int> seq(l, 0);
    while (true) {
        f(seq);
        std::size_t i = 0;
        while (i < l && ++seq[i] == static_cast<int>(v)) seq[i++] = 0;
        if (i == l) return;
    }
}

double odometer_kl(const CategoricalARModel& p, const CategoricalARModel& q) {
    double kl = 0.0;
    for_each_sequence(p.alphabet(), p.length(), [&](const std::vector<int>& s) {
        const double a = sequence_prob(p, s);
        if (a > 0.0) kl += a * (std::log(a) - std::log(sequence_prob(q, s)));
    });
    return kl;
}

double odometer_entropy(const CategoricalARModel& p) {
    double h = 0.0;
    for_each_sequence(p.alphabet(), p.length(), [&](const std::vector<int>& s) {
        const double a = sequence_prob(p, s);
        if (a > 0.0) h -= a * std::log(a);
    });
    return h;
}

CategoricalARModel bernoulli(double p0) {
    RowMatrix t(1, 2);
    t << p0, 1.0 - p0;
    return {2, 1, 0, {t}};
}

} // namespace

TEST(KlEstimate, IdenticalColumnsGiveZero) {
    const std::vector<double> col{-1.0, -2.5, -0.3, -7.0};
    const auto t = LogLikelihoodTable::from_columns(SampleSource::data(), {{"ground-truth", col}, {"m", col}});
    const auto e = kl_estimate(t, "m");
    EXPECT_EQ(e.value, 0.0);
    EXPECT_EQ(e.std_error, 0.0);
    EXPECT_EQ(e.n, 4u);
    EXPECT_EQ(e.direction, Direction::KL);
}

TEST(KlEstimate, ConstantColumnsGiveExactDifference) {
    const auto t = LogLikelihoodTable::from_columns(SampleSource::data(),
                                                    {{"ground-truth", std::vector<double>(1000, -3.7)}, {"m", std::vector<double>(1000, -5.2)}});
    const auto e = kl_estimate(t, "m");
    EXPECT_EQ(e.value, -3.7 - -5.2);
    EXPECT_EQ(e.std_error, 0.0);
}

TEST(KlEstimate, ConstantDifferenceIsExact) {
    Rng rng(9);
    std::vector<double> a, b;
    for (int i = 0; i < 5000; ++i) {
        a.push_back(-static_cast<double>(rng.uniform_index(10240)) / 1024.0);
        b.push_back(a.back() - 0.5);
    }
    const auto t = LogLikelihoodTable::from_columns(SampleSource::data(), {{"ground-truth", a}, {"m", b}});
    const double d0 = a[0] - b[0];
    bool all_same = true;
    for (std::size_t i = 0; i < a.size(); ++i) all_same = all_same && (a[i] - b[i] == d0);
    ASSERT_TRUE(all_same);
    const auto e = kl_estimate(t, "m");
    EXPECT_EQ(e.value, d0);
    EXPECT_EQ(e.std_error, 0.0);
}

TEST(KlEstimate, GaussianShiftByOne) {
    const auto e = kl_estimate(gaussian_table(SampleSource::data(), 0.0, 20000, 4), "m");
    EXPECT_LE(std::abs(e.value - 0.5), 3.0 * e.std_error);
    EXPECT_GT(e.std_error, 0.0);
}

TEST(RklEstimate, GaussianShiftByOne) {
    const auto e = rkl_estimate(gaussian_table(SampleSource::model("m"), 1.0, 20000, 5), "m");
    EXPECT_EQ(e.direction, Direction::RKL);
    EXPECT_LE(std::abs(e.value - 0.5), 3.0 * e.std_error);
}

TEST(RklEstimate, IdenticalColumnsGiveZero) {
    const std::vector<double> col{-1.0, -4.0};
    const auto t = LogLikelihoodTable::from_columns(SampleSource::model("m"), {{"ground-truth", col}, {"m", col}});
    EXPECT_EQ(rkl_estimate(t, "m").value, 0.0);
}

TEST(DivergenceEstimates, SourceAndColumnContracts) {
    const auto data_t = gaussian_table(SampleSource::data(), 0.0, 10, 1);
    const auto model_t = gaussian_table(SampleSource::model("m"), 1.0, 10, 1);
    EXPECT_THROW(rkl_estimate(data_t, "m"), UsageError);
    EXPECT_THROW(kl_estimate(model_t, "m"), UsageError);
    EXPECT_THROW(rkl_estimate(gaussian_table(SampleSource::model("other"), 1.0, 10, 1), "m"), UsageError);
    EXPECT_THROW(kl_estimate(data_t, "missing"), UsageError);
    const auto no_gt = LogLikelihoodTable::from_columns(SampleSource::data(), {{"m", {1.0}}});
    EXPECT_THROW(kl_estimate(no_gt, "m"), UsageError);
}

TEST(ArSample, SingleSymbolAlphabet) {
    const auto m = CategoricalARModel::uniform(1, 5, 2);
    const auto s = ar_sample(m, 10, 3);
    for (int sym : s.sequences.symbols) EXPECT_EQ(sym, 0);
    for (double ll : s.loglik.values) EXPECT_EQ(ll, 0.0);
}

TEST(ArSample, BernoulliFrequencies) {
    const std::size_t n = 100000;
    const auto s = ar_sample(bernoulli(0.25), n, 8);
    std::size_t zeros = 0;
    for (int sym : s.sequences.symbols) zeros += sym == 0;
    const double f = static_cast<double>(zeros) / static_cast<double>(n);
    EXPECT_LE(std::abs(f - 0.25), 3.0 * std::sqrt(0.25 * 0.75 / static_cast<double>(n)));
}

TEST(ArSample, DeterministicAndLoglikConsistent) {
    const auto m = CategoricalARModel::random(3, 5, 2, 1.5, 77);
    const auto a = ar_sample(m, 200, 12);
    const auto b = ar_sample(m, 200, 12);
    EXPECT_EQ(a.sequences.symbols, b.sequences.symbols);
    EXPECT_EQ(a.loglik.values, b.loglik.values);
    const auto re = ar_loglik(m, a.sequences);
    for (std::size_t i = 0; i < re.values.size(); ++i) {
        const std::vector<int> seq(a.sequences[i].begin(), a.sequences[i].end());
        EXPECT_NEAR(re.values[i], a.loglik.values[i], 1e-12);
        EXPECT_NEAR(re.values[i], std::log(sequence_prob(m, seq)), 1e-12);
    }
}

TEST(ArLoglik, UniformModel) {
    const auto m = CategoricalARModel::uniform(4, 6, 2);
    const auto s = ar_sample(CategoricalARModel::random(4, 6, 2, 2.0, 1), 50, 2);
    for (double ll : ar_loglik(m, s.sequences).values) EXPECT_NEAR(ll, -6.0 * std::log(4.0), 1e-12);
}

TEST(ArLoglik, HandTwoStepModel) {
    RowMatrix t0(1, 2), t1(2, 2);
    t0 << 0.3, 0.7;
    t1 << 0.6, 0.4, 0.1, 0.9;
    const CategoricalARModel m(2, 2, 1, {t0, t1});
    const SequenceBatch batch{2, {0, 1, 1, 0}};
    const auto ll = ar_loglik(m, batch);
    EXPECT_NEAR(ll.values[0], std::log(0.3) + std::log(0.4), 1e-15);
    EXPECT_NEAR(ll.values[1], std::log(0.7) + std::log(0.1), 1e-15);
    EXPECT_EQ(ll.floored, 0u);
}

TEST(ArLoglik, ZeroProbabilityIsFloored) {
    const auto m = bernoulli(1.0);
    const auto ll = ar_loglik(m, SequenceBatch{1, {0, 1, 0}});
    EXPECT_EQ(ll.values[0], 0.0);
    EXPECT_EQ(ll.values[1], kLogFloor);
    EXPECT_EQ(ll.floored, 1u);
}

TEST(ArLoglik, OutOfAlphabetSymbol) {
    EXPECT_THROW(ar_loglik(bernoulli(0.5), SequenceBatch{1, {2}}), ArgumentError);
    EXPECT_THROW(ar_loglik(bernoulli(0.5), SequenceBatch{1, {-1}}), ArgumentError);
    EXPECT_THROW(ar_loglik(bernoulli(0.5), SequenceBatch{2, {0, 0}}), ArgumentError);
}

TEST(ArModel, RejectsInvalidTables) {
    RowMatrix t(1, 2);
    t << 0.5, 0.6;
    EXPECT_THROW(CategoricalARModel(2, 1, 0, {t}), ArgumentError);
    t << 1.2, -0.2;
    EXPECT_THROW(CategoricalARModel(2, 1, 0, {t}), ArgumentError);
    EXPECT_THROW(CategoricalARModel(2, 2, 1, {RowMatrix::Constant(1, 2, 0.5)}), ArgumentError);
}

TEST(ArModel, JsonRoundTrip) {
    const auto m = CategoricalARModel::random(3, 4, 2, 1.0, 5);
    const auto back = CategoricalARModel::from_json(nlohmann::json::parse(m.to_json().dump()));
    ASSERT_TRUE(back.same_shape(m));
    for (std::size_t t = 0; t < m.length(); ++t) EXPECT_EQ(back.tables()[t], m.tables()[t]);
    EXPECT_THROW(CategoricalARModel::from_json(nlohmann::json{{"alphabet", 2}}), FormatError);
}

TEST(ExactKl, SameModelIsZero) {
    const auto m = CategoricalARModel::random(4, 5, 2, 1.5, 3);
    EXPECT_NEAR(exact_kl_enumerate(m, m), 0.0, 1e-14);
}

TEST(ExactKl, BernoulliHandValue) {
    const double expected = 0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0);
    EXPECT_NEAR(exact_kl_enumerate(bernoulli(0.5), bernoulli(0.25)), expected, 1e-15);
    EXPECT_NEAR(expected, 0.14384, 1e-5);
}

TEST(ExactKl, MatchesOdometerEnumeration) {
    for (std::uint64_t s = 0; s < 5; ++s) {
        const auto p = CategoricalARModel::random(3, 5, 2, 1.5, s);
        const auto q = CategoricalARModel::random(3, 5, 2, 1.0, 100 + s);
        EXPECT_NEAR(exact_kl_enumerate(p, q), odometer_kl(p, q), 1e-11);
    }
}

TEST(ExactKl, InfiniteWhenSupportIsMissed) {
    EXPECT_TRUE(std::isinf(exact_kl_enumerate(bernoulli(0.5), bernoulli(1.0))));
    EXPECT_EQ(exact_kl_enumerate(bernoulli(1.0), bernoulli(0.5)), std::log(2.0));
}

TEST(ExactKl, StateSpaceLimit) {
    const auto big = CategoricalARModel::uniform(4, 11, 1);
    EXPECT_THROW(exact_kl_enumerate(big, big), ArgumentError);
    const auto edge = CategoricalARModel::uniform(4, 10, 1);
    EXPECT_NEAR(exact_kl_enumerate(edge, edge), 0.0, 1e-12);
}

TEST(ExactKl, GibbsInequality) {
    for (std::uint64_t s = 0; s < 30; ++s) {
        const auto p = CategoricalARModel::random(2 + s % 3, 3, 1, 1.5, s);
        const auto q = CategoricalARModel::random(2 + s % 3, 3, 1, 1.5, 1000 + s);
        EXPECT_GT(exact_kl_enumerate(p, q), 0.0);
    }
}

TEST(ExactKl, MonteCarloEstimateAgrees) {
    const auto p = bernoulli(0.5);
    const auto q = bernoulli(0.25);
    const auto s = ar_sample(p, 100000, 21);
    const auto t = make_loglik_table(s.sequences, p, {{"q", &q}}, SampleSource::data());
    const auto e = kl_estimate(t, "q");
    EXPECT_LE(std::abs(e.value - exact_kl_enumerate(p, q)), 3.0 * e.std_error);
}

TEST(Trajectory, EndpointsAndEntropyIdentity) {
    const auto target = CategoricalARModel::random(4, 5, 2, 1.5, 9);
    const auto traj = testbed_trajectory(target, 2, {1.0, 0.0});
    for (std::size_t t = 0; t < target.length(); ++t) EXPECT_EQ(traj[1].tables()[t], target.tables()[t]);
    const double expected = 5.0 * std::log(4.0) - odometer_entropy(target);
    EXPECT_NEAR(exact_kl_enumerate(target, traj[0]), expected, 1e-11);
}

TEST(Trajectory, KlDecreasesAlongSchedule) {
    const auto target = CategoricalARModel::random(4, 6, 2, 1.5, 2);
    std::vector<double> w;
    for (int i = 0; i < 20; ++i) w.push_back(1.0 - i / 19.0);
    const auto traj = testbed_trajectory(target, 20, w);
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& m : traj) {
        const double kl = exact_kl_enumerate(target, m);
        EXPECT_LT(kl, prev);
        prev = kl;
    }
    EXPECT_NEAR(prev, 0.0, 1e-14);
}

TEST(Trajectory, ScheduleValidation) {
    const auto target = CategoricalARModel::uniform(2, 2, 1);
    EXPECT_THROW(testbed_trajectory(target, 2, {0.5, 0.7}), ArgumentError);
    EXPECT_THROW(testbed_trajectory(target, 1, {1.5}), ArgumentError);
    EXPECT_THROW(testbed_trajectory(target, 3, {1.0, 0.5}), ArgumentError);
}
