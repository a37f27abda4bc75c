#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gmeval/errors.hpp"
#include "gmeval/feature_store.hpp"

namespace gmeval {

inline constexpr std::size_t kDefaultIsSplits = 10;

struct IsResult {
    double mean = 0.0;
    double std = 0.0;
    std::size_t n_splits = 0;
    std::vector<double> split_scores;
};

// exp(mean_x KL(p(y|x) || p(y))) for one block of rows, p(y) = column mean of the block.
inline double inception_score_block(const RowMatrix& p) {
    const Eigen::RowVectorXd marginal = p.colwise().mean();
    double total = 0.0;
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        double kl = 0.0;
        for (Eigen::Index c = 0; c < p.cols(); ++c) {
            const double q = p(i, c);
            if (q > 0.0) kl += q * (std::log(q) - std::log(marginal(c)));
        }
        total += kl;
    }
    return std::exp(total / static_cast<double>(p.rows()));
}

// Rows are cut into n_splits contiguous blocks of N / n_splits rows; the last
// block also takes the remainder.
inline IsResult inception_score(const ProbMatrix& probs, std::size_t n_splits = kDefaultIsSplits) {
    const std::size_t n = probs.rows();
    if (n_splits < 1) throw ArgumentError("inception_score: n_splits must be >= 1");
    if (n_splits > n) {
        throw ArgumentError("inception_score: n_splits " + std::to_string(n_splits) + " exceeds " + std::to_string(n) + " rows");
    }
    IsResult r;
    r.n_splits = n_splits;
    const std::size_t block = n / n_splits;
    for (std::size_t s = 0; s < n_splits; ++s) {
        const std::size_t begin = s * block;
        const std::size_t len = (s + 1 == n_splits) ? n - begin : block;
        r.split_scores.push_back(inception_score_block(
            probs.data().middleRows(static_cast<Eigen::Index>(begin), static_cast<Eigen::Index>(len))));
    }
    double sum = 0.0;
    for (double v : r.split_scores) sum += v;
    r.mean = sum / static_cast<double>(n_splits);
    double ss = 0.0;
    for (double v : r.split_scores) ss += (v - r.mean) * (v - r.mean);
    r.std = std::sqrt(ss / static_cast<double>(n_splits));
    return r;
}

} // namespace gmeval
