#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gmeval/stat_tests.hpp"
#include "test_support.hpp"

using namespace gmeval;
namespace gt = gmeval::testing;

namespace {

std::vector<double> lattice(std::size_t n, std::uint64_t mul, std::uint64_t mod) {
    std::vector<double> v;
    for (std::uint64_t i = 0; i < n; ++i) v.push_back(static_cast<double>((i * mul) % mod) / static_cast<double>(mod));
    return v;
}

std::vector<double> normals(std::size_t n, Rng& rng) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.normal();
    return v;
}

int sign(double v) { return (v > 0) - (v < 0); }

double brute_kendall(const std::vector<double>& x, const std::vector<double>& y) {
    double c = 0, tx = 0, ty = 0, n0 = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            const int sx = sign(x[i] - x[j]);
            const int sy = sign(y[i] - y[j]);
            c += sx * sy;
            tx += sx == 0;
            ty += sy == 0;
            n0 += 1;
        }
    }
    return c / std::sqrt((n0 - tx) * (n0 - ty));
}

std::vector<double> brute_ranks(const std::vector<double>& v) {
    std::vector<double> r;
    for (double a : v) {
        double less = 0, equal = 0;
        for (double b : v) {
            less += b < a;
            equal += b == a;
        }
        r.push_back(less + (equal + 1.0) / 2.0);
    }
    return r;
}

double covariance_pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    double cxy = 0, cxx = 0, cyy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        cxy += (x[i] - sx / n) * (y[i] - sy / n);
        cxx += (x[i] - sx / n) * (x[i] - sx / n);
        cyy += (y[i] - sy / n) * (y[i] - sy / n);
    }
    return cxy / std::sqrt(cxx * cyy);
}

std::vector<double> tied_vector(std::size_t n, std::size_t levels, Rng& rng) {
    std::vector<double> v(n);
    for (auto& x : v) x = static_cast<double>(rng.uniform_index(levels));
    return v;
}

ScoreTable make_table(std::vector<std::string> metrics, std::vector<Orientation> orient, RowMatrix values) {
    ScoreTable t;
    t.metrics = std::move(metrics);
    t.orientation = std::move(orient);
    for (Eigen::Index i = 0; i < values.rows(); ++i) t.rows.push_back("m" + std::to_string(i));
    t.values = std::move(values);
    return t;
}

} // namespace

TEST(RandomUnitVector, OneDimensionalIsSign) {
    Rng rng(1);
    for (int i = 0; i < 20; ++i) EXPECT_EQ(std::abs(random_unit_vector(1, rng)(0)), 1.0);
    EXPECT_THROW(random_unit_vector(0, rng), ArgumentError);
}

TEST(RandomUnitVector, UnitNormAndCenteredCoordinates) {
    Rng rng(2);
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(8);
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
        const auto v = random_unit_vector(8, rng);
        ASSERT_NEAR(v.norm(), 1.0, 1e-12);
        sum += v;
    }
    // Each coordinate has variance 1/d on the sphere.
    const double sigma = std::sqrt(1.0 / 8.0 / draws);
    for (int k = 0; k < 8; ++k) EXPECT_LE(std::abs(sum(k) / draws), 3.0 * sigma);
}

TEST(DagostinoK2, MatchesReferenceValues) {
    const auto u = lattice(200, 7919, 1009);
    std::vector<double> cubed, tri;
    const auto w = lattice(200, 104729, 1013);
    for (std::size_t i = 0; i < u.size(); ++i) {
        cubed.push_back(u[i] * u[i] * u[i]);
        tri.push_back(u[i] + w[i]);
    }
    struct Case {
        const std::vector<double>* x;
        double k2, p, zs, zk;
    };
    const Case cases[] = {
        {&u, 97.06938512594603, 8.349314860787697e-22, -0.06631841141770133, -9.852156464158142},
        {&cubed, 27.506157287418212, 1.0644219844870194e-06, 5.238761220560622, -0.24806886416555995},
        {&tri, 7.852564799026877, 0.019716835791288412, -1.2756074346816704, -2.4950732397289914},
    };
    for (const auto& c : cases) {
        const auto r = dagostino_k2(*c.x);
        EXPECT_NEAR(r.k2, c.k2, 1e-9 * c.k2);
        EXPECT_NEAR(r.p, c.p, 1e-8 * c.p);
        EXPECT_NEAR(r.z_skew, c.zs, 1e-9);
        EXPECT_NEAR(r.z_kurt, c.zk, 1e-9);
    }
}

TEST(DagostinoK2, PIsChiSquareTwoSurvival) {
    Rng rng(4);
    const auto r = dagostino_k2(normals(300, rng));
    EXPECT_NEAR(r.k2, r.z_skew * r.z_skew + r.z_kurt * r.z_kurt, 1e-12);
    EXPECT_NEAR(r.p, std::exp(-r.k2 / 2.0), 1e-15);
    EXPECT_GE(r.p, 0.0);
    EXPECT_LE(r.p, 1.0);
}

TEST(DagostinoK2, NullMeanPNearHalf) {
    double sum = 0.0;
    for (std::uint64_t s = 0; s < 200; ++s) {
        Rng rng(1000 + s);
        sum += dagostino_k2(normals(5000, rng)).p;
    }
    const double mean = sum / 200.0;
    EXPECT_GE(mean, 0.40);
    EXPECT_LE(mean, 0.60);
}

TEST(DagostinoK2, ExponentialIsRejected) {
    Rng rng(5);
    std::vector<double> x(1000);
    for (auto& v : x) v = rng.exponential();
    EXPECT_LT(dagostino_k2(x).p, 1e-6);
}

TEST(DagostinoK2, InputChecks) {
    EXPECT_THROW(dagostino_k2(std::vector<double>(19, 1.0)), InsufficientDataError);
    EXPECT_THROW(dagostino_k2(std::vector<double>(50, 2.5)), DegenerateError);
}

TEST(ProjectionNormality, GaussianFeaturesLookNormal) {
    Rng rng(6);
    const FeatureMatrix f(gt::standard_normal(5000, 16, rng));
    const auto rep = projection_normality(f, 200, 1);
    EXPECT_EQ(rep.per_projection_p.size(), 200u);
    EXPECT_EQ(rep.T, 200u);
    EXPECT_EQ(rep.d, 16u);
    EXPECT_GE(rep.mean_p, 0.35);
    EXPECT_LE(rep.mean_p, 0.65);
    for (double p : rep.per_projection_p) {
        EXPECT_GE(p, 0.0);
        EXPECT_LE(p, 1.0);
    }
}

TEST(ProjectionNormality, SeparatedMixtureIsRejected) {
    Rng rng(7);
    // Directions nearly orthogonal to the mean gap still look Gaussian and
    // dominate the average, so the gap has to be wide.
    RowMatrix x = gt::standard_normal(5000, 16, rng);
    for (Eigen::Index i = 0; i < x.rows(); ++i) x.row(i).array() += (i % 2 == 0) ? 50.0 : -50.0;
    EXPECT_LT(projection_normality(FeatureMatrix(x), 200, 2).mean_p, 0.01);
}

TEST(ProjectionNormality, SingleProjection) {
    Rng rng(8);
    const auto rep = projection_normality(FeatureMatrix(gt::standard_normal(100, 3, rng)), 1, 0);
    ASSERT_EQ(rep.per_projection_p.size(), 1u);
    EXPECT_EQ(rep.mean_p, rep.per_projection_p[0]);
}

TEST(ProjectionNormality, DeterministicAndRowPermutationInvariant) {
    Rng rng(9);
    const RowMatrix x = gt::standard_normal(300, 5, rng);
    const auto a = projection_normality(FeatureMatrix(x), 100, 3);
    const auto b = projection_normality(FeatureMatrix(x), 100, 3);
    EXPECT_EQ(a.per_projection_p, b.per_projection_p);

    std::vector<std::size_t> perm(300);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    rng.shuffle(perm);
    const auto c = projection_normality(FeatureMatrix(x).subset(perm), 100, 3);
    auto pa = a.per_projection_p, pc = c.per_projection_p;
    std::sort(pa.begin(), pa.end());
    std::sort(pc.begin(), pc.end());
    for (std::size_t i = 0; i < pa.size(); ++i) EXPECT_NEAR(pa[i], pc[i], 1e-9 * std::max(pa[i], 1e-300) + 1e-15);
}

TEST(ProjectionNormality, TooFewRows) {
    EXPECT_THROW(projection_normality(FeatureMatrix(RowMatrix::Random(19, 2)), 5, 0), InsufficientDataError);
    EXPECT_THROW(projection_normality(FeatureMatrix(RowMatrix::Random(30, 2)), 0, 0), ArgumentError);
}

TEST(Kendall, Examples) {
    const std::vector<double> x{1, 2, 3, 4};
    EXPECT_EQ(kendall_tau(x, x), 1.0);
    EXPECT_EQ(kendall_tau(x, {4, 3, 2, 1}), -1.0);
    EXPECT_NEAR(kendall_tau(x, {1, 3, 2, 4}), 2.0 / 3.0, 1e-15);
}

TEST(Kendall, MatchesPairwiseOracleWithTies) {
    Rng rng(10);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 2 + rng.uniform_index(300);
        const auto x = t % 2 ? tied_vector(n, 1 + n / 4, rng) : normals(n, rng);
        const auto y = t % 3 ? tied_vector(n, 2 + rng.uniform_index(10), rng) : normals(n, rng);
        bool x_const = std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; });
        bool y_const = std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; });
        if (x_const || y_const) {
            EXPECT_THROW(kendall_tau(x, y), UndefinedCorrelationError);
            continue;
        }
        EXPECT_NEAR(kendall_tau(x, y), brute_kendall(x, y), 1e-12);
    }
}

TEST(Kendall, InputChecks) {
    EXPECT_THROW(kendall_tau({1, 2}, {1, 2, 3}), ArgumentError);
    EXPECT_THROW(kendall_tau({1}, {1}), InsufficientDataError);
    EXPECT_THROW(kendall_tau({1, 1, 1}, {1, 2, 3}), UndefinedCorrelationError);
}

TEST(Spearman, Examples) {
    const std::vector<double> x{0.5, 1.5, 2.0, 9.0};
    EXPECT_NEAR(spearman_rho(x, x), 1.0, 1e-15);
    EXPECT_NEAR(spearman_rho(x, {7, 3, 1, -4}), -1.0, 1e-15);
    EXPECT_THROW(spearman_rho(x, {2, 2, 2, 2}), UndefinedCorrelationError);
}

TEST(Spearman, MatchesRankThenPearsonOracle) {
    Rng rng(11);
    for (int t = 0; t < 50; ++t) {
        const auto x = t % 2 ? tied_vector(50, 8, rng) : normals(50, rng);
        const auto y = normals(50, rng);
        EXPECT_NEAR(spearman_rho(x, y), covariance_pearson(brute_ranks(x), brute_ranks(y)), 1e-12);
    }
}

TEST(AverageRanks, TiesShareTheMean) {
    EXPECT_EQ(average_ranks({10, 20, 20, 5}), (std::vector<double>{2, 3.5, 3.5, 1}));
}

TEST(Pearson, Examples) {
    const std::vector<double> x{1, 4, 2, 8, 5};
    std::vector<double> y, z;
    for (double v : x) {
        y.push_back(2 * v + 3);
        z.push_back(-v);
    }
    EXPECT_NEAR(pearson_r(x, y), 1.0, 1e-15);
    EXPECT_NEAR(pearson_r(x, z), -1.0, 1e-15);
    EXPECT_THROW(pearson_r(x, {1, 1, 1, 1, 1}), UndefinedCorrelationError);
}

TEST(Pearson, MatchesCovarianceOracle) {
    Rng rng(12);
    for (int t = 0; t < 50; ++t) {
        const auto x = normals(40, rng);
        auto y = normals(40, rng);
        for (std::size_t i = 0; i < y.size(); ++i) y[i] += 0.5 * x[i];
        EXPECT_NEAR(pearson_r(x, y), covariance_pearson(x, y), 1e-12);
    }
}

TEST(Correlations, BoundedSymmetricAndMonotoneInvariant) {
    Rng rng(13);
    for (int t = 0; t < 50; ++t) {
        const auto x = tied_vector(60, 20, rng);
        const auto y = normals(60, rng);
        // Strictly increasing map: a*exp(b*v) + c with a, b > 0.
        const double a = 0.1 + rng.uniform01(), b = 0.1 + 0.5 * rng.uniform01(), c = rng.normal();
        std::vector<double> fx;
        for (double v : x) fx.push_back(a * std::exp(b * v) + c);
        for (auto m : {CorrelationMethod::Kendall, CorrelationMethod::Spearman, CorrelationMethod::Pearson}) {
            const double r = correlation(m, x, y);
            EXPECT_GE(r, -1.0);
            EXPECT_LE(r, 1.0);
            EXPECT_NEAR(r, correlation(m, y, x), 1e-14);
        }
        EXPECT_NEAR(kendall_tau(fx, y), kendall_tau(x, y), 1e-14);
        EXPECT_NEAR(spearman_rho(fx, y), spearman_rho(x, y), 1e-12);
    }
}

TEST(CorrelationMethodNames, RoundTrip) {
    for (auto m : {CorrelationMethod::Kendall, CorrelationMethod::Spearman, CorrelationMethod::Pearson}) {
        EXPECT_EQ(parse_correlation_method(to_string(m)), m);
    }
    EXPECT_THROW(parse_correlation_method("tau"), ArgumentError);
}

TEST(CorrelationMatrix, IdenticalColumnsAndOrientation) {
    RowMatrix v(4, 3);
    v << 1, 1, -1, 2, 2, -2, 5, 5, -5, 3, 3, -3;
    const auto t = make_table({"a", "b", "neg"}, {Orientation::HigherBetter, Orientation::HigherBetter, Orientation::LowerBetter}, v);
    const auto cm = correlation_matrix(t, CorrelationMethod::Kendall);
    EXPECT_EQ(cm.values, Eigen::MatrixXd::Ones(3, 3));
    EXPECT_TRUE(cm.undefined.empty());
    EXPECT_EQ(cm.labels, t.metrics);
}

TEST(CorrelationMatrix, ThreeByThreeMatchesBruteForce) {
    RowMatrix v(6, 3);
    v << 1, 9, 0.3, 2, 7, 0.1, 3, 8, 0.3, 4, 2, 0.9, 5, 4, 0.5, 6, 1, 0.8;
    const auto t = make_table({"x", "y", "z"}, {Orientation::HigherBetter, Orientation::LowerBetter, Orientation::HigherBetter}, v);
    const auto cm = correlation_matrix(t, CorrelationMethod::Kendall);
    for (int i = 0; i < 3; ++i) {
        EXPECT_EQ(cm.values(i, i), 1.0);
        for (int j = 0; j < 3; ++j) {
            if (i == j) continue;
            EXPECT_NEAR(cm.values(i, j), brute_kendall(t.oriented_column(i), t.oriented_column(j)), 1e-15);
            EXPECT_EQ(cm.values(i, j), cm.values(j, i));
        }
    }
}

TEST(CorrelationMatrix, ConstantColumnFlagsCells) {
    RowMatrix v(3, 3);
    v << 1, 4, 7, 2, 4, 8, 3, 4, 6;
    const auto t = make_table({"a", "flat", "c"}, std::vector<Orientation>(3, Orientation::HigherBetter), v);
    const auto cm = correlation_matrix(t, CorrelationMethod::Spearman);
    ASSERT_EQ(cm.undefined.size(), 2u);
    EXPECT_TRUE(std::isnan(cm.values(0, 1)));
    EXPECT_TRUE(std::isnan(cm.values(2, 1)));
    // Ranks (1, 2, 3) against (2, 3, 1).
    EXPECT_NEAR(cm.values(0, 2), -0.5, 1e-15);
}

TEST(CorrelationMatrix, RowSelectionAndMinimumRows) {
    RowMatrix v(4, 2);
    v << 1, 4, 2, 3, 3, 2, 4, 1;
    const auto t = make_table({"a", "b"}, std::vector<Orientation>(2, Orientation::HigherBetter), v);
    EXPECT_EQ(correlation_matrix(t.select_rows({0, 2}), CorrelationMethod::Pearson).values(0, 1), -1.0);
    EXPECT_THROW(correlation_matrix(t.select_rows({1}), CorrelationMethod::Kendall), InsufficientDataError);
}

TEST(ScoreTableCsv, ParsesOrientationHeaderAndRows) {
    std::istringstream in("orientation,higher,lower\ncheckpoint,IS,FID\nckpt00,3.5,40\nckpt01,4.0,30.25\n");
    const auto t = read_score_table(in);
    EXPECT_EQ(t.row_header, "checkpoint");
    EXPECT_EQ(t.rows, (std::vector<std::string>{"ckpt00", "ckpt01"}));
    EXPECT_EQ(t.metrics, (std::vector<std::string>{"IS", "FID"}));
    EXPECT_EQ(t.orientation[1], Orientation::LowerBetter);
    EXPECT_EQ(t.values(1, 1), 30.25);
    EXPECT_EQ(t.oriented_column(1), (std::vector<double>{-40, -30.25}));
}

TEST(ScoreTableCsv, Errors) {
    std::istringstream no_orient("model,a\nx,1\n");
    EXPECT_THROW(read_score_table(no_orient), FormatError);
    std::istringstream bad_flag("orientation,up\nmodel,a\nx,1\n");
    EXPECT_THROW(read_score_table(bad_flag), FormatError);
    std::istringstream ragged("orientation,higher\nmodel,a\nx,1,2\n");
    EXPECT_THROW(read_score_table(ragged), DataError);
    std::istringstream missing("orientation,higher\nmodel,a\nx,\n");
    EXPECT_THROW(read_score_table(missing), DataError);
    std::istringstream text("orientation,higher\nmodel,a\nx,abc\n");
    EXPECT_THROW(read_score_table(text), DataError);
}
