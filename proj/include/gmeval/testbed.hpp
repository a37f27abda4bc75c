#pragma once

// Desk-scale training-trajectory experiment: a target categorical AR model,
// checkpoints that approach it, and every metric evaluated per checkpoint
// next to the exact KL / RKL.
//
// Sequences are turned into features by flattening them one-hot (length L*V)
// and multiplying by a fixed seeded Gaussian matrix (L*V x embed_dim).
// Class probabilities for IS are softmax(one-hot * W_cls) with a second fixed
// seeded matrix (L*V x classes).

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "gmeval/divergence.hpp"
#include "gmeval/errors.hpp"
#include "gmeval/extrapolation.hpp"
#include "gmeval/feature_store.hpp"
#include "gmeval/gaussian.hpp"
#include "gmeval/inception_score.hpp"
#include "gmeval/kernel.hpp"
#include "gmeval/stat_tests.hpp"

namespace gmeval {

struct TestbedConfig {
    std::uint64_t seed = 0;
    std::optional<CategoricalARModel> target_model;
    std::size_t alphabet = 4;
    std::size_t length = 6;
    std::size_t order = 2;
    double sharpness = 1.5;
    std::size_t checkpoints = 20;
    std::vector<double> schedule; // empty: linear from 1 down to 0
    std::size_t samples = 2000;
    std::size_t mc_samples = 10000;
    std::size_t embed_dim = 64;
    std::size_t classes = 10;
    double classifier_scale = 2.0;
    std::size_t kid_subset_size = 500;
    std::size_t kid_subsets = 10;
    std::size_t extrapolation_points = kDefaultExtrapolationPoints;

    static TestbedConfig from_json(const nlohmann::json& j) {
        TestbedConfig c;
        try {
            c.seed = j.at("seed").get<std::uint64_t>();
            if (j.contains("target")) {
                const auto& t = j.at("target");
                if (t.contains("tables")) {
                    c.target_model = CategoricalARModel::from_json(t);
                } else {
                    c.alphabet = t.value("alphabet", c.alphabet);
                    c.length = t.value("length", c.length);
                    c.order = t.value("order", c.order);
                    c.sharpness = t.value("sharpness", c.sharpness);
                }
            }
            c.checkpoints = j.value("checkpoints", c.checkpoints);
            c.schedule = j.value("schedule", c.schedule);
            c.samples = j.value("samples", c.samples);
            c.mc_samples = j.value("mc_samples", c.mc_samples);
            c.embed_dim = j.value("embed_dim", c.embed_dim);
            c.classes = j.value("classes", c.classes);
            c.classifier_scale = j.value("classifier_scale", c.classifier_scale);
            c.kid_subset_size = j.value("kid_subset_size", c.kid_subset_size);
            c.kid_subsets = j.value("kid_subsets", c.kid_subsets);
            c.extrapolation_points = j.value("extrapolation_points", c.extrapolation_points);
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(std::string("testbed config: ") + e.what());
        }
        return c;
    }

    nlohmann::json to_json() const {
        nlohmann::json j{{"seed", seed},
                         {"checkpoints", checkpoints},
                         {"schedule", resolved_schedule()},
                         {"samples", samples},
                         {"mc_samples", mc_samples},
                         {"embed_dim", embed_dim},
                         {"classes", classes},
                         {"classifier_scale", classifier_scale},
                         {"kid_subset_size", kid_subset_size},
                         {"kid_subsets", kid_subsets},
                         {"extrapolation_points", extrapolation_points}};
        if (target_model) {
            j["target"] = target_model->to_json();
        } else {
            j["target"] = {{"alphabet", alphabet}, {"length", length}, {"order", order}, {"sharpness", sharpness}};
        }
        return j;
    }

    std::vector<double> resolved_schedule() const {
        if (!schedule.empty()) return schedule;
        std::vector<double> w(checkpoints);
        for (std::size_t i = 0; i < checkpoints; ++i) {
            w[i] = checkpoints == 1 ? 0.0 : static_cast<double>(checkpoints - 1 - i) / static_cast<double>(checkpoints - 1);
        }
        return w;
    }

    CategoricalARModel target() const {
        if (target_model) return *target_model;
        return CategoricalARModel::random(alphabet, length, order, sharpness, splitmix64(seed ^ 0x7461726765740000ULL));
    }
};

struct DivergenceRow {
    std::string checkpoint;
    double weight = 0.0;
    double kl_exact = 0.0;
    DivergenceEstimate kl_mc;
    double rkl_exact = 0.0;
    DivergenceEstimate rkl_mc;
};

struct TestbedResult {
    ScoreTable scores;
    std::vector<DivergenceRow> divergence;
    bool kl_strictly_decreasing = false;
};

// Seeded linear maps from one-hot sequences to features and class logits.
class SequenceEmbedding {
public:
    SequenceEmbedding(std::size_t alphabet, std::size_t length, std::size_t dim, std::size_t classes, double classifier_scale,
                      std::uint64_t seed)
        : alphabet_(alphabet), length_(length) {
        const auto width = static_cast<Eigen::Index>(alphabet * length);
        project_.resize(width, static_cast<Eigen::Index>(dim));
        classify_.resize(width, static_cast<Eigen::Index>(classes));
        Rng prj = Rng::derived(seed, 0x656d626564ULL);
        for (Eigen::Index i = 0; i < project_.size(); ++i) project_.data()[i] = prj.normal();
        Rng cls = Rng::derived(seed, 0x636c617373ULL);
        for (Eigen::Index i = 0; i < classify_.size(); ++i) classify_.data()[i] = classifier_scale * cls.normal();
    }

    FeatureMatrix features(const SequenceBatch& batch) const {
        return FeatureMatrix(apply(batch, project_), ProvenanceMeta{"synthetic", "one-hot-projection", "testbed", ""});
    }

    ProbMatrix probabilities(const SequenceBatch& batch) const {
        RowMatrix logits = apply(batch, classify_);
        for (Eigen::Index i = 0; i < logits.rows(); ++i) {
            const double mx = logits.row(i).maxCoeff();
            logits.row(i) = (logits.row(i).array() - mx).exp();
            logits.row(i) /= logits.row(i).sum();
        }
        return ProbMatrix(std::move(logits), ProvenanceMeta{"synthetic", "one-hot-softmax", "testbed", ""});
    }

private:
    RowMatrix apply(const SequenceBatch& batch, const RowMatrix& w) const {
        if (batch.length != length_) throw ArgumentError("embedding: sequence length mismatch");
        RowMatrix out = RowMatrix::Zero(static_cast<Eigen::Index>(batch.size()), w.cols());
        for (std::size_t i = 0; i < batch.size(); ++i) {
            const auto seq = batch[i];
            for (std::size_t t = 0; t < length_; ++t) {
                out.row(static_cast<Eigen::Index>(i)) += w.row(static_cast<Eigen::Index>(t * alphabet_ + static_cast<std::size_t>(seq[t])));
            }
        }
        return out;
    }

    std::size_t alphabet_;
    std::size_t length_;
    RowMatrix project_;
    RowMatrix classify_;
};

inline std::string checkpoint_label(std::size_t i) {
    std::string s = std::to_string(i);
    return "ckpt" + std::string(s.size() < 2 ? 2 - s.size() : 0, '0') + s;
}

inline TestbedResult run_testbed(const TestbedConfig& cfg) {
    if (cfg.checkpoints < 2) throw ArgumentError("testbed: need at least 2 checkpoints");
    if (cfg.samples < cfg.kid_subset_size) throw ArgumentError("testbed: kid_subset_size exceeds samples");
    if (cfg.mc_samples < 2) throw ArgumentError("testbed: mc_samples must be >= 2");
    const CategoricalARModel target = cfg.target();
    const auto schedule = cfg.resolved_schedule();
    const auto models = testbed_trajectory(target, cfg.checkpoints, schedule);
    const SequenceEmbedding embed(target.alphabet(), target.length(), cfg.embed_dim, cfg.classes, cfg.classifier_scale, cfg.seed);

    const auto real_samples = ar_sample(target, cfg.samples, splitmix64(cfg.seed ^ 1));
    const FeatureMatrix real = embed.features(real_samples.sequences);
    const GaussianModel real_fit = fit_gaussian(real);
    const auto data_samples = ar_sample(target, cfg.mc_samples, splitmix64(cfg.seed ^ 2));

    TestbedResult out;
    out.scores.row_header = "checkpoint";
    out.scores.metrics = {"KL", "RKL", "FID", "FID_inf", "KID", "neg_IS", "neg_IS_inf"};
    out.scores.orientation.assign(out.scores.metrics.size(), Orientation::LowerBetter);
    out.scores.values.resize(static_cast<Eigen::Index>(models.size()), static_cast<Eigen::Index>(out.scores.metrics.size()));

    for (std::size_t i = 0; i < models.size(); ++i) {
        const auto& model = models[i];
        const std::string label = checkpoint_label(i);
        const std::uint64_t ck_seed = Rng::derived(cfg.seed, 100 + i).next_u64();

        DivergenceRow row;
        row.checkpoint = label;
        row.weight = schedule[i];
        row.kl_exact = exact_kl_enumerate(target, model);
        row.rkl_exact = exact_kl_enumerate(model, target);
        row.kl_mc = kl_estimate(make_loglik_table(data_samples.sequences, target, {{label, &model}}, SampleSource::data()), label);
        const auto model_mc = ar_sample(model, cfg.mc_samples, splitmix64(ck_seed ^ 3));
        row.rkl_mc = rkl_estimate(
            make_loglik_table(model_mc.sequences, target, {{label, &model}}, SampleSource::model(label)), label);

        const auto gen_samples = ar_sample(model, cfg.samples, splitmix64(ck_seed ^ 4));
        const FeatureMatrix gen = embed.features(gen_samples.sequences);
        const ProbMatrix probs = embed.probabilities(gen_samples.sequences);
        const double fid_value = frechet_distance(real_fit, fit_gaussian(gen));
        const auto fid_curve = fid_infinity(real, gen, cfg.extrapolation_points, default_fid_n_min(gen.cols(), gen.rows()),
                                            splitmix64(ck_seed ^ 5));
        const auto kid_value = kid(real, gen, cfg.kid_subset_size, cfg.kid_subsets, splitmix64(ck_seed ^ 6));
        const auto is_value = inception_score(probs, 1);
        const auto is_curve = is_infinity(probs, cfg.extrapolation_points, default_is_n_min(probs.rows()), splitmix64(ck_seed ^ 7));

        out.scores.rows.push_back(label);
        const std::vector<double> cells{row.kl_exact, row.rkl_exact, fid_value, fid_curve.intercept, kid_value.mean, -is_value.mean,
                                        -is_curve.intercept};
        for (std::size_t j = 0; j < cells.size(); ++j) {
            out.scores.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cells[j];
        }
        out.divergence.push_back(row);
    }

    out.kl_strictly_decreasing = true;
    for (std::size_t i = 1; i < out.divergence.size(); ++i) {
        if (!(out.divergence[i].kl_exact < out.divergence[i - 1].kl_exact)) out.kl_strictly_decreasing = false;
    }
    return out;
}

} // namespace gmeval
