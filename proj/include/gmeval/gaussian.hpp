#pragma once

// Gaussian fits to feature sets, the Frechet distance between them (FID),
// and likelihood ranking of samples under a fitted reference Gaussian.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gmeval/errors.hpp"
#include "gmeval/feature_store.hpp"

namespace gmeval {

inline constexpr double kSymmetryTolerance = 1e-10;
inline constexpr double kPsdTolerance = 1e-8;
inline constexpr double kFrechetClamp = 1e-6;
inline constexpr double kDensityRidge = 1e-6;
// Ridge used when the covariance has zero trace (all reference rows equal).
inline constexpr double kDensityRidgeFloor = 1e-12;

struct GaussianModel {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    std::size_t n_fit = 0;

    std::size_t dim() const { return static_cast<std::size_t>(mean.size()); }
};

namespace detail {

inline double max_abs(const Eigen::MatrixXd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline void require_symmetric(const Eigen::MatrixXd& m, const char* what) {
    if (m.rows() != m.cols()) throw DomainError(std::string(what) + ": matrix is not square");
    const double scale = std::max(max_abs(m), 1.0);
    if (max_abs(m - m.transpose()) > kSymmetryTolerance * scale) {
        throw DomainError(std::string(what) + ": matrix is not symmetric");
    }
}

} // namespace detail

inline GaussianModel fit_gaussian(const FeatureMatrix& features) {
    const auto& x = features.data();
    if (x.rows() < 2) throw InsufficientDataError("fit_gaussian: need at least 2 samples");
    GaussianModel g;
    g.n_fit = features.rows();
    g.mean = x.colwise().mean().transpose();
    const RowMatrix centered = x.rowwise() - g.mean.transpose();
    Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(x.rows() - 1);
    g.cov = 0.5 * (cov + cov.transpose());
    return g;
}

// Symmetric PSD square root through an eigendecomposition; eigenvalues below
// zero (round-off) are clamped.
inline Eigen::MatrixXd matrix_sqrt_psd(const Eigen::MatrixXd& m) {
    detail::require_symmetric(m, "matrix_sqrt_psd");
    const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
    if (eig.info() != Eigen::Success) throw DomainError("matrix_sqrt_psd: eigendecomposition failed");
    const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Eigen::MatrixXd& v = eig.eigenvectors();
    Eigen::MatrixXd s = v * root.asDiagonal() * v.transpose();
    return 0.5 * (s + s.transpose());
}

namespace detail {

inline void require_psd(const Eigen::MatrixXd& m, const char* what) {
    require_symmetric(m, what);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
    const auto& ev = eig.eigenvalues();
    if (ev.size() == 0) return;
    const double largest = std::max(ev.maxCoeff(), 0.0);
    if (ev.minCoeff() < -kPsdTolerance * std::max(largest, 1e-300)) {
        throw DomainError(std::string(what) + ": covariance is not positive semi-definite");
    }
}

} // namespace detail

// ||mu_a - mu_b||^2 + Tr(S_a + S_b - 2 (S_a S_b)^{1/2}). The cross term uses
// Tr sqrt(S_a^{1/2} S_b S_a^{1/2}), which has the same trace and stays symmetric.
inline double frechet_distance(const GaussianModel& a, const GaussianModel& b) {
    if (a.dim() != b.dim()) {
        throw ArgumentError("frechet_distance: dimension mismatch (" + std::to_string(a.dim()) + " vs " +
                            std::to_string(b.dim()) + ")");
    }
    detail::require_psd(a.cov, "frechet_distance");
    detail::require_psd(b.cov, "frechet_distance");

    const double mean_term = (a.mean - b.mean).squaredNorm();
    const Eigen::MatrixXd root_a = matrix_sqrt_psd(a.cov);
    Eigen::MatrixXd inner = root_a * b.cov * root_a;
    inner = 0.5 * (inner + inner.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(inner, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) throw DomainError("frechet_distance: eigendecomposition failed");
    const double cross = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();

    double d = mean_term + a.cov.trace() + b.cov.trace() - 2.0 * cross;
    if (d < 0.0 && d >= -kFrechetClamp) d = 0.0;
    return d;
}

inline void require_same_dim(const FeatureMatrix& a, const FeatureMatrix& b, const char* what) {
    if (a.cols() != b.cols()) {
        throw ArgumentError(std::string(what) + ": dimension mismatch (" + std::to_string(a.cols()) + " vs " +
                            std::to_string(b.cols()) + ")");
    }
}

inline double fid(const FeatureMatrix& real, const FeatureMatrix& gen) {
    require_same_dim(real, gen, "fid");
    return frechet_distance(fit_gaussian(real), fit_gaussian(gen));
}

// Log density of N(mu, Sigma + eps I) with a cached Cholesky factor.
class GaussianDensity {
public:
    explicit GaussianDensity(const GaussianModel& g) : mean_(g.mean) {
        const auto d = static_cast<double>(g.dim());
        if (g.dim() == 0) throw ArgumentError("gaussian density: zero dimension");
        ridge_ = kDensityRidge * g.cov.trace() / d;
        if (!(ridge_ > 0.0)) ridge_ = kDensityRidgeFloor;
        Eigen::MatrixXd reg = g.cov;
        reg.diagonal().array() += ridge_;
        llt_.compute(reg);
        if (llt_.info() != Eigen::Success) throw DomainError("gaussian density: regularized covariance not positive definite");
        const Eigen::MatrixXd l = llt_.matrixL();
        log_norm_ = -0.5 * d * std::log(2.0 * std::numbers::pi) - l.diagonal().array().log().sum();
    }

    double ridge() const { return ridge_; }

    template <typename Vec>
    double operator()(const Vec& x) const {
        if (static_cast<Eigen::Index>(x.size()) != mean_.size()) throw ArgumentError("gaussian density: dimension mismatch");
        const Eigen::VectorXd diff = Eigen::VectorXd(x) - mean_;
        const Eigen::VectorXd z = llt_.matrixL().solve(diff);
        return log_norm_ - 0.5 * z.squaredNorm();
    }

private:
    Eigen::VectorXd mean_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
    double ridge_ = 0.0;
    double log_norm_ = 0.0;
};

inline double gaussian_log_density(const GaussianModel& g, const Eigen::VectorXd& x) {
    return GaussianDensity(g)(x);
}

struct ScoredIndex {
    std::size_t index = 0;
    double score = 0.0;

    friend bool operator==(const ScoredIndex&, const ScoredIndex&) = default;
};

struct LikelihoodRanking {
    std::vector<ScoredIndex> lowest;  // ascending by score
    std::vector<ScoredIndex> highest; // ascending by score
};

// Scores every candidate under a Gaussian fitted to `reference` and returns
// the k least and k most likely. Equal scores prefer the smaller index when
// selecting either end.
inline LikelihoodRanking rank_by_likelihood(const FeatureMatrix& reference, const FeatureMatrix& candidates, std::size_t k) {
    require_same_dim(reference, candidates, "rank_by_likelihood");
    if (k > candidates.rows()) {
        throw ArgumentError("rank_by_likelihood: k = " + std::to_string(k) + " exceeds " +
                            std::to_string(candidates.rows()) + " candidates");
    }
    LikelihoodRanking out;
    if (k == 0) return out;

    const GaussianDensity density(fit_gaussian(reference));
    std::vector<ScoredIndex> scored(candidates.rows());
    for (std::size_t i = 0; i < scored.size(); ++i) {
        scored[i] = {i, density(candidates.data().row(static_cast<Eigen::Index>(i)).transpose())};
    }

    const auto ascending = [](const ScoredIndex& a, const ScoredIndex& b) {
        return a.score != b.score ? a.score < b.score : a.index < b.index;
    };
    const auto descending = [](const ScoredIndex& a, const ScoredIndex& b) {
        return a.score != b.score ? a.score > b.score : a.index < b.index;
    };

    auto low = scored;
    std::partial_sort(low.begin(), low.begin() + static_cast<std::ptrdiff_t>(k), low.end(), ascending);
    out.lowest.assign(low.begin(), low.begin() + static_cast<std::ptrdiff_t>(k));

    auto high = std::move(scored);
    std::partial_sort(high.begin(), high.begin() + static_cast<std::ptrdiff_t>(k), high.end(), descending);
    out.highest.assign(high.begin(), high.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(out.highest.begin(), out.highest.end(), ascending);
    return out;
}

} // namespace gmeval
