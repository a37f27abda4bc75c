#pragma once

// FID_inf / IS_inf: evaluate the metric at several sample sizes n, regress the
// score on 1/n, and report the intercept as the infinite-sample value.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "gmeval/errors.hpp"
#include "gmeval/feature_store.hpp"
#include "gmeval/gaussian.hpp"
#include "gmeval/inception_score.hpp"
#include "gmeval/rng.hpp"

namespace gmeval {

struct CurvePoint {
    std::size_t n = 0;
    double score = 0.0;
};

struct ExtrapolationCurve {
    std::vector<CurvePoint> points;
    double intercept = 0.0;
    double slope = 0.0;
    double r2 = 0.0;
};

inline constexpr std::size_t kDefaultExtrapolationPoints = 15;

// Ordinary least squares of score on 1/n.
inline ExtrapolationCurve extrapolate_to_infinity(std::vector<CurvePoint> points) {
    std::set<std::size_t> distinct;
    for (const auto& p : points) {
        if (p.n == 0) throw ArgumentError("extrapolate_to_infinity: sample sizes must be positive");
        distinct.insert(p.n);
    }
    if (distinct.size() < 2) throw DegenerateError("extrapolate_to_infinity: need at least 2 distinct sample sizes");

    const auto m = static_cast<double>(points.size());
    double mx = 0.0, my = 0.0;
    for (const auto& p : points) {
        mx += 1.0 / static_cast<double>(p.n);
        my += p.score;
    }
    mx /= m;
    my /= m;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& p : points) {
        const double dx = 1.0 / static_cast<double>(p.n) - mx;
        const double dy = p.score - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    ExtrapolationCurve c;
    c.slope = sxy / sxx;
    c.intercept = my - c.slope * mx;
    double sse = 0.0;
    for (const auto& p : points) {
        const double r = p.score - (c.intercept + c.slope / static_cast<double>(p.n));
        sse += r * r;
    }
    c.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
    c.points = std::move(points);
    return c;
}

// n_points sizes evenly spaced in 1/n from 1/n_min to 1/n_max, rounded.
inline std::vector<std::size_t> extrapolation_sizes(std::size_t n_min, std::size_t n_max, std::size_t n_points) {
    if (n_points < 2) throw ArgumentError("extrapolation: n_points must be >= 2");
    if (n_min < 1 || n_max < n_min) {
        throw ArgumentError("extrapolation: need 1 <= n_min <= available samples (n_min = " + std::to_string(n_min) +
                            ", available = " + std::to_string(n_max) + ")");
    }
    std::vector<std::size_t> sizes;
    const double lo = 1.0 / static_cast<double>(n_min);
    const double hi = 1.0 / static_cast<double>(n_max);
    for (std::size_t i = 0; i < n_points; ++i) {
        const double inv = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n_points - 1);
        auto n = static_cast<std::size_t>(std::llround(1.0 / inv));
        sizes.push_back(std::clamp(n, n_min, n_max));
    }
    return sizes;
}

inline std::size_t default_fid_n_min(std::size_t d, std::size_t n_gen) {
    return std::min(n_gen, std::max(d + 2, n_gen / 10));
}

inline std::size_t default_is_n_min(std::size_t n) { return std::min(n, std::max<std::size_t>(2, n / 10)); }

// Real-side statistics use the full real set; each size draws one generated
// subset from the stream derived from (seed, size index).
inline ExtrapolationCurve fid_infinity(const FeatureMatrix& real, const FeatureMatrix& gen, std::size_t n_points,
                                       std::size_t n_min, std::uint64_t seed) {
    require_same_dim(real, gen, "fid_infinity");
    if (gen.rows() < n_min) {
        throw ArgumentError("fid_infinity: " + std::to_string(gen.rows()) + " generated samples < n_min " + std::to_string(n_min));
    }
    if (n_min < 2) throw ArgumentError("fid_infinity: n_min must be >= 2");
    const auto sizes = extrapolation_sizes(n_min, gen.rows(), n_points);
    const GaussianModel real_fit = fit_gaussian(real);
    std::vector<CurvePoint> pts;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        Rng rng = Rng::derived(seed, i);
        const auto idx = rng.sample_without_replacement(gen.rows(), sizes[i]);
        pts.push_back({sizes[i], frechet_distance(real_fit, fit_gaussian(gen.subset(idx)))});
    }
    return extrapolate_to_infinity(std::move(pts));
}

inline ExtrapolationCurve is_infinity(const ProbMatrix& probs, std::size_t n_points, std::size_t n_min, std::uint64_t seed) {
    if (probs.rows() < n_min) {
        throw ArgumentError("is_infinity: " + std::to_string(probs.rows()) + " rows < n_min " + std::to_string(n_min));
    }
    const auto sizes = extrapolation_sizes(n_min, probs.rows(), n_points);
    std::vector<CurvePoint> pts;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        Rng rng = Rng::derived(seed, i);
        const auto idx = rng.sample_without_replacement(probs.rows(), sizes[i]);
        pts.push_back({sizes[i], inception_score(probs.subset(idx), 1).mean});
    }
    return extrapolate_to_infinity(std::move(pts));
}

} // namespace gmeval
