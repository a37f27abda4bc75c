#pragma once

// Unbiased squared MMD under a polynomial kernel, and KID as the average of
// MMD^2 over random subset pairs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gmeval/errors.hpp"
#include "gmeval/feature_store.hpp"
#include "gmeval/gaussian.hpp"
#include "gmeval/rng.hpp"

namespace gmeval {

// k(x, y) = (gamma <x, y> + coef)^degree; gamma = nullopt means 1/d.
struct KernelSpec {
    int degree = 3;
    std::optional<double> gamma;
    double coef = 1.0;

    double resolved_gamma(std::size_t d) const {
        const double g = gamma ? *gamma : 1.0 / static_cast<double>(d);
        if (!(g > 0.0)) throw ArgumentError("kernel: gamma must be positive");
        return g;
    }

    void validate() const {
        if (degree < 1) throw ArgumentError("kernel: degree must be >= 1");
        if (gamma && !(*gamma > 0.0)) throw ArgumentError("kernel: gamma must be positive");
    }
};

inline double kernel_eval(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const KernelSpec& k) {
    k.validate();
    if (x.size() != y.size()) throw ArgumentError("kernel_eval: dimension mismatch");
    return std::pow(k.resolved_gamma(static_cast<std::size_t>(x.size())) * x.dot(y) + k.coef, k.degree);
}

namespace detail {

inline Eigen::MatrixXd gram(const RowMatrix& a, const RowMatrix& b, double gamma, const KernelSpec& k) {
    Eigen::MatrixXd g = (gamma * (a * b.transpose())).array() + k.coef;
    if (k.degree != 1) g = g.array().pow(static_cast<double>(k.degree));
    return g;
}

inline bool canonical_less(const RowMatrix& a, const RowMatrix& b) {
    if (a.rows() != b.rows()) return a.rows() < b.rows();
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

} // namespace detail

// U-statistic: mean_{i!=j} k(x_i,x_j) + mean_{i!=j} k(y_i,y_j) - 2 mean_{i,j} k(x_i,y_j).
// Can be negative.
inline double mmd2_unbiased(const FeatureMatrix& x, const FeatureMatrix& y, const KernelSpec& k) {
    k.validate();
    require_same_dim(x, y, "mmd2_unbiased");
    if (x.rows() < 2 || y.rows() < 2) throw InsufficientDataError("mmd2_unbiased: need at least 2 samples per side");
    const double gamma = k.resolved_gamma(x.cols());
    const auto m = static_cast<double>(x.rows());
    const auto n = static_cast<double>(y.rows());

    const Eigen::MatrixXd kxx = detail::gram(x.data(), x.data(), gamma, k);
    const Eigen::MatrixXd kyy = detail::gram(y.data(), y.data(), gamma, k);
    // Cross Gram in a fixed operand order so mmd2(X, Y) == mmd2(Y, X) bit for bit.
    const bool swap = detail::canonical_less(y.data(), x.data());
    const Eigen::MatrixXd kxy = swap ? detail::gram(y.data(), x.data(), gamma, k) : detail::gram(x.data(), y.data(), gamma, k);

    const double sxx = (kxx.sum() - kxx.trace()) / (m * (m - 1.0));
    const double syy = (kyy.sum() - kyy.trace()) / (n * (n - 1.0));
    const double sxy = kxy.sum() / (m * n);
    return sxx + syy - 2.0 * sxy;
}

struct KidResult {
    double mean = 0.0;
    double std = 0.0;
    std::size_t subset_size = 0;
    std::size_t n_subsets = 0;
    std::vector<double> values;
};

inline std::size_t default_kid_subset_size(std::size_t n_real, std::size_t n_gen) {
    return std::min<std::size_t>({1000, n_real, n_gen});
}

inline constexpr std::size_t kDefaultKidSubsets = 100;

// Subset s draws from its own stream derived from (seed, s).
inline KidResult kid(const FeatureMatrix& real, const FeatureMatrix& gen, std::size_t subset_size, std::size_t n_subsets,
                     std::uint64_t seed, const KernelSpec& k = {}) {
    require_same_dim(real, gen, "kid");
    if (n_subsets < 1) throw ArgumentError("kid: n_subsets must be >= 1");
    if (subset_size > std::min(real.rows(), gen.rows())) {
        throw ArgumentError("kid: subset_size " + std::to_string(subset_size) + " exceeds available samples");
    }
    if (subset_size < 2) throw ArgumentError("kid: subset_size must be >= 2");

    KidResult r;
    r.subset_size = subset_size;
    r.n_subsets = n_subsets;
    r.values.reserve(n_subsets);
    for (std::size_t s = 0; s < n_subsets; ++s) {
        Rng rng = Rng::derived(seed, s);
        const auto ri = rng.sample_without_replacement(real.rows(), subset_size);
        const auto gi = rng.sample_without_replacement(gen.rows(), subset_size);
        r.values.push_back(mmd2_unbiased(real.subset(ri), gen.subset(gi), k));
    }
    double sum = 0.0;
    for (double v : r.values) sum += v;
    r.mean = sum / static_cast<double>(n_subsets);
    double ss = 0.0;
    for (double v : r.values) ss += (v - r.mean) * (v - r.mean);
    r.std = std::sqrt(ss / static_cast<double>(n_subsets));
    return r;
}

} // namespace gmeval
