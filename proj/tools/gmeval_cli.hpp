#pragma once

// Subcommand wiring for the gmeval executable. Kept in a header so tests can
// drive the exact same code path in-process.
//
// Exit codes: 0 success, 1 computation failure, 2 input-contract violation.

#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gmeval/divergence.hpp"
#include "gmeval/errors.hpp"
#include "gmeval/extrapolation.hpp"
#include "gmeval/feature_store.hpp"
#include "gmeval/gaussian.hpp"
#include "gmeval/inception_score.hpp"
#include "gmeval/kernel.hpp"
#include "gmeval/report.hpp"
#include "gmeval/rng.hpp"
#include "gmeval/stat_tests.hpp"
#include "gmeval/testbed.hpp"

namespace gmeval::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCompute = 1;
inline constexpr int kExitInput = 2;

struct CommonFlags {
    std::string out;
    std::string format = "json";

    ReportFormat report_format() const { return format == "csv" ? ReportFormat::Csv : ReportFormat::Json; }
};

struct KernelFlags {
    int degree = 3;
    std::optional<double> gamma;
    double coef = 1.0;

    KernelSpec spec() const { return KernelSpec{degree, gamma, coef}; }
    nlohmann::json to_json() const {
        return {{"degree", degree}, {"gamma", gamma ? nlohmann::json(*gamma) : nlohmann::json("auto")}, {"coef", coef}};
    }
};

// Result of a command: the serialized text plus the exit status it implies.
struct Emission {
    std::string text;
    int status = kExitOk;
};

namespace detail {

inline void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--out", flags.out, "Write the report to this path instead of stdout");
    cmd->add_option("--format", flags.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
}

inline void add_kernel(CLI::App* cmd, KernelFlags& k) {
    cmd->add_option("--degree", k.degree, "Polynomial kernel degree");
    cmd->add_option("--gamma", k.gamma, "Kernel gamma (default 1/d)");
    cmd->add_option("--coef", k.coef, "Kernel additive constant");
}

inline void require_matching_backbone(const FeatureMatrix& a, const FeatureMatrix& b, std::ostream& err) {
    if (a.meta().backbone != b.meta().backbone) {
        throw InputError("backbone mismatch: '" + a.meta().backbone + "' vs '" + b.meta().backbone + "'");
    }
    if (a.cols() != b.cols()) {
        throw InputError("dimension mismatch: " + std::to_string(a.cols()) + " vs " + std::to_string(b.cols()));
    }
    if (a.meta().preprocessing != b.meta().preprocessing) {
        err << "warning: preprocessing differs ('" << a.meta().preprocessing << "' vs '" << b.meta().preprocessing << "')\n";
    }
}

inline nlohmann::json ok_cell(nlohmann::json values) {
    values["status"] = "ok";
    return values;
}

// Parses "a:b" (half-open index range) or a comma-separated list of row labels.
inline std::vector<std::size_t> parse_row_filter(const std::string& spec, const ScoreTable& t) {
    std::vector<std::size_t> idx;
    if (const auto colon = spec.find(':'); colon != std::string::npos) {
        try {
            const auto lo = std::stoul(spec.substr(0, colon));
            const auto hi = std::stoul(spec.substr(colon + 1));
            if (lo >= hi || hi > t.rows.size()) throw ArgumentError("row range '" + spec + "' out of bounds");
            for (auto i = lo; i < hi; ++i) idx.push_back(i);
        } catch (const std::logic_error&) {
            throw ArgumentError("bad row range '" + spec + "'");
        }
        return idx;
    }
    std::stringstream ss(spec);
    std::string label;
    while (std::getline(ss, label, ',')) {
        const auto it = std::find(t.rows.begin(), t.rows.end(), label);
        if (it == t.rows.end()) throw ArgumentError("no row labelled '" + label + "'");
        idx.push_back(static_cast<std::size_t>(it - t.rows.begin()));
    }
    return idx;
}

} // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Evaluation metrics for generative models over feature files"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    CommonFlags common;
    std::function<Emission()> action;

    // fid
    std::string real_path, gen_path, probs_path;
    auto* fid_cmd = app.add_subcommand("fid", "Frechet distance between Gaussian fits of two feature files");
    fid_cmd->add_option("--real", real_path, "Reference features (GMF1)")->required();
    fid_cmd->add_option("--gen", gen_path, "Generated features (GMF1)")->required();
    detail::add_common(fid_cmd, common);
    fid_cmd->callback([&] {
        action = [&] {
            const auto real = read_features(real_path);
            const auto gen = read_features(gen_path);
            detail::require_matching_backbone(real, gen, err);
            auto rep = report_header("fid");
            rep["inputs"] = {input_entry(real_path, &real.meta()), input_entry(gen_path, &gen.meta())};
            rep["results"] = {{"fid", fid(real, gen)}, {"n_real", real.rows()}, {"n_gen", gen.rows()}, {"d", real.cols()}};
            return Emission{serialize(rep, common.report_format())};
        };
    });

    // kid
    std::uint64_t seed = 0;
    std::optional<std::size_t> subset_size;
    std::size_t n_subsets = kDefaultKidSubsets;
    KernelFlags kernel;
    auto* kid_cmd = app.add_subcommand("kid", "Kernel distance: unbiased polynomial-kernel MMD^2 over random subsets");
    kid_cmd->add_option("--real", real_path)->required();
    kid_cmd->add_option("--gen", gen_path)->required();
    kid_cmd->add_option("--seed", seed)->required();
    kid_cmd->add_option("--subset-size", subset_size, "Rows per subset (default min(1000, N))");
    kid_cmd->add_option("--subsets", n_subsets, "Number of subset pairs");
    detail::add_kernel(kid_cmd, kernel);
    detail::add_common(kid_cmd, common);
    kid_cmd->callback([&] {
        action = [&] {
            const auto real = read_features(real_path);
            const auto gen = read_features(gen_path);
            detail::require_matching_backbone(real, gen, err);
            const auto m = subset_size.value_or(default_kid_subset_size(real.rows(), gen.rows()));
            auto rep = report_header("kid");
            rep["seed"] = seed;
            rep["parameters"] = {{"subset_size", m}, {"subsets", n_subsets}, {"kernel", kernel.to_json()}};
            rep["inputs"] = {input_entry(real_path, &real.meta()), input_entry(gen_path, &gen.meta())};
            rep["results"] = to_json(kid(real, gen, m, n_subsets, seed, kernel.spec()));
            return Emission{serialize(rep, common.report_format())};
        };
    });

    // is
    std::size_t n_splits = kDefaultIsSplits;
    std::optional<std::uint64_t> shuffle_seed;
    auto* is_cmd = app.add_subcommand("is", "Inception score from a class-probability file");
    is_cmd->add_option("--probs", probs_path)->required();
    is_cmd->add_option("--splits", n_splits, "Number of contiguous row blocks");
    is_cmd->add_option("--shuffle-seed", shuffle_seed, "Shuffle rows with this seed before splitting");
    detail::add_common(is_cmd, common);
    is_cmd->callback([&] {
        action = [&] {
            auto probs = read_probs(probs_path);
            auto rep = report_header("is");
            if (shuffle_seed) {
                std::vector<std::size_t> idx(probs.rows());
                std::iota(idx.begin(), idx.end(), std::size_t{0});
                Rng rng(*shuffle_seed);
                rng.shuffle(idx);
                probs = probs.subset(idx);
                rep["seed"] = *shuffle_seed;
            }
            rep["parameters"] = {{"splits", n_splits}, {"shuffled", shuffle_seed.has_value()}};
            rep["inputs"] = {input_entry(probs_path, &probs.meta())};
            rep["results"] = to_json(inception_score(probs, n_splits));
            return Emission{serialize(rep, common.report_format())};
        };
    });

    // fid-inf
    std::size_t n_points = kDefaultExtrapolationPoints;
    std::optional<std::size_t> n_min;
    auto* fidinf_cmd = app.add_subcommand("fid-inf", "FID extrapolated to infinite sample size");
    fidinf_cmd->add_option("--real", real_path)->required();
    fidinf_cmd->add_option("--gen", gen_path)->required();
    fidinf_cmd->add_option("--seed", seed)->required();
    fidinf_cmd->add_option("--points", n_points, "Number of sample sizes");
    fidinf_cmd->add_option("--n-min", n_min, "Smallest sample size (default max(d+2, N_gen/10))");
    detail::add_common(fidinf_cmd, common);
    fidinf_cmd->callback([&] {
        action = [&] {
            const auto real = read_features(real_path);
            const auto gen = read_features(gen_path);
            detail::require_matching_backbone(real, gen, err);
            const auto lo = n_min.value_or(default_fid_n_min(gen.cols(), gen.rows()));
            if (lo < gen.cols()) err << "warning: n_min " << lo << " is below the feature dimension " << gen.cols() << "\n";
            auto rep = report_header("fid-inf");
            rep["seed"] = seed;
            rep["parameters"] = {{"points", n_points}, {"n_min", lo}};
            rep["inputs"] = {input_entry(real_path, &real.meta()), input_entry(gen_path, &gen.meta())};
            rep["results"] = to_json(fid_infinity(real, gen, n_points, lo, seed));
            return Emission{serialize(rep, common.report_format())};
        };
    });

    // is-inf
    auto* isinf_cmd = app.add_subcommand("is-inf", "Inception score extrapolated to infinite sample size");
    isinf_cmd->add_option("--probs", probs_path)->required();
    isinf_cmd->add_option("--seed", seed)->required();
    isinf_cmd->add_option("--points", n_points, "Number of sample sizes");
    isinf_cmd->add_option("--n-min", n_min, "Smallest sample size (default max(2, N/10))");
    detail::add_common(isinf_cmd, common);
    isinf_cmd->callback([&] {
        action = [&] {
            const auto probs = read_probs(probs_path);
            const auto lo = n_min.value_or(default_is_n_min(probs.rows()));
            auto rep = report_header("is-inf");
            rep["seed"] = seed;
            rep["parameters"] = {{"points", n_points}, {"n_min", lo}};
            rep["inputs"] = {input_entry(probs_path, &probs.meta())};
            rep["results"] = to_json(is_infinity(probs, n_points, lo, seed));
            return Emission{serialize(rep, common.report_format())};
        };
    });

    // suite
    std::optional<std::size_t> is_n_min;
    auto* suite_cmd = app.add_subcommand("suite", "FID, KID, FID_inf, IS and IS_inf in one report");
    suite_cmd->add_option("--real", real_path)->required();
    suite_cmd->add_option("--gen", gen_path)->required();
    suite_cmd->add_option("--probs", probs_path, "Class probabilities of the generated set (enables IS cells)");
    suite_cmd->add_option("--seed", seed)->required();
    suite_cmd->add_option("--subset-size", subset_size);
    suite_cmd->add_option("--subsets", n_subsets);
    suite_cmd->add_option("--points", n_points);
    suite_cmd->add_option("--n-min", n_min, "Smallest FID_inf sample size");
    suite_cmd->add_option("--is-n-min", is_n_min, "Smallest IS_inf sample size");
    suite_cmd->add_option("--splits", n_splits);
    detail::add_kernel(suite_cmd, kernel);
    detail::add_common(suite_cmd, common);
    suite_cmd->callback([&] {
        action = [&] {
            const auto real = read_features(real_path);
            const auto gen = read_features(gen_path);
            detail::require_matching_backbone(real, gen, err);
            std::optional<ProbMatrix> probs;
            if (!probs_path.empty()) probs = read_probs(probs_path);

            auto rep = report_header("suite");
            rep["seed"] = seed;
            rep["inputs"] = {input_entry(real_path, &real.meta()), input_entry(gen_path, &gen.meta())};
            if (probs) rep["inputs"].push_back(input_entry(probs_path, &probs->meta()));

            const auto m = subset_size.value_or(default_kid_subset_size(real.rows(), gen.rows()));
            const auto lo = n_min.value_or(default_fid_n_min(gen.cols(), gen.rows()));
            nlohmann::json params{{"kid", {{"subset_size", m}, {"subsets", n_subsets}, {"kernel", kernel.to_json()}}},
                                  {"fid_inf", {{"points", n_points}, {"n_min", lo}}}};
            // Sub-metric streams are derived from the run seed so each is independent.
            const std::uint64_t kid_seed = Rng::derived(seed, 1).next_u64();
            const std::uint64_t fid_inf_seed = Rng::derived(seed, 2).next_u64();
            const std::uint64_t is_inf_seed = Rng::derived(seed, 3).next_u64();

            int status = kExitOk;
            nlohmann::json results;
            const auto cell = [&](const char* name, const std::function<nlohmann::json()>& f) {
                try {
                    results[name] = detail::ok_cell(f());
                } catch (const std::exception& e) {
                    results[name] = {{"status", "failed"}, {"error", e.what()}};
                    status = kExitCompute;
                }
            };
            cell("fid", [&] { return nlohmann::json{{"value", fid(real, gen)}}; });
            cell("kid", [&] { return to_json(kid(real, gen, m, n_subsets, kid_seed, kernel.spec())); });
            cell("fid_inf", [&] { return to_json(fid_infinity(real, gen, n_points, lo, fid_inf_seed)); });
            if (probs) {
                const auto is_lo = is_n_min.value_or(default_is_n_min(probs->rows()));
                params["is"] = {{"splits", n_splits}};
                params["is_inf"] = {{"points", n_points}, {"n_min", is_lo}};
                cell("is", [&] { return to_json(inception_score(*probs, n_splits)); });
                cell("is_inf", [&] { return to_json(is_infinity(*probs, n_points, is_lo, is_inf_seed)); });
            } else {
                results["is"] = {{"status", "skipped"}};
                results["is_inf"] = {{"status", "skipped"}};
            }
            params["sub_seeds"] = {{"kid", kid_seed}, {"fid_inf", fid_inf_seed}, {"is_inf", is_inf_seed}};
            rep["parameters"] = params;
            rep["results"] = results;
            return Emission{serialize(rep, common.report_format()), status};
        };
    });

    // divergence
    std::string table_path, model_col, direction = "kl";
    auto* div_cmd = app.add_subcommand("divergence", "Monte-Carlo KL or reverse KL from a log-likelihood table");
    div_cmd->add_option("--table", table_path, "Log-likelihood table (GMF1 kind 2)")->required();
    div_cmd->add_option("--model-col", model_col, "Column holding the model's log-likelihoods")->required();
    div_cmd->add_option("--direction", direction)->check(CLI::IsMember({"kl", "rkl"}));
    detail::add_common(div_cmd, common);
    div_cmd->callback([&] {
        action = [&] {
            const auto table = read_loglik(table_path);
            const auto est = direction == "kl" ? kl_estimate(table, model_col) : rkl_estimate(table, model_col);
            auto rep = report_header("divergence");
            rep["parameters"] = {{"model_col", model_col}, {"direction", direction}, {"sample_source", table.source().to_string()}};
            rep["inputs"] = {input_entry(table_path, &table.meta())};
            rep["results"] = to_json(est);
            return Emission{serialize(rep, common.report_format())};
        };
    });

    // normality
    std::string features_path;
    std::size_t projections = kDefaultProjections;
    auto* norm_cmd = app.add_subcommand("normality", "Mean D'Agostino K^2 p-value over random 1-D projections");
    norm_cmd->add_option("--features", features_path)->required();
    norm_cmd->add_option("-T,--projections", projections, "Number of random directions");
    norm_cmd->add_option("--seed", seed)->required();
    detail::add_common(norm_cmd, common);
    norm_cmd->callback([&] {
        action = [&] {
            const auto features = read_features(features_path);
            auto rep = report_header("normality");
            rep["seed"] = seed;
            rep["parameters"] = {{"T", projections}};
            rep["inputs"] = {input_entry(features_path, &features.meta())};
            rep["results"] = to_json(projection_normality(features, projections, seed));
            return Emission{serialize(rep, common.report_format())};
        };
    });

    // anomaly
    std::string reference_path, candidates_path;
    std::size_t k = 10;
    auto* anom_cmd = app.add_subcommand("anomaly", "Rank candidates by log density under a Gaussian fitted to a reference set");
    anom_cmd->add_option("--reference", reference_path)->required();
    anom_cmd->add_option("--candidates", candidates_path)->required();
    anom_cmd->add_option("--k", k, "How many lowest and highest to list");
    detail::add_common(anom_cmd, common);
    anom_cmd->callback([&] {
        action = [&] {
            const auto reference = read_features(reference_path);
            const auto candidates = read_features(candidates_path);
            detail::require_matching_backbone(reference, candidates, err);
            auto rep = report_header("anomaly");
            rep["parameters"] = {{"k", k}};
            rep["inputs"] = {input_entry(reference_path, &reference.meta()), input_entry(candidates_path, &candidates.meta())};
            rep["results"] = to_json(rank_by_likelihood(reference, candidates, k));
            return Emission{serialize(rep, common.report_format())};
        };
    });

    // correlate
    std::string scores_path, method = "kendall", rows_filter;
    auto* corr_cmd = app.add_subcommand("correlate", "Correlation matrix between metric columns of a score table");
    corr_cmd->add_option("--scores", scores_path, "Score table CSV")->required();
    corr_cmd->add_option("--method", method)->check(CLI::IsMember({"kendall", "spearman", "pearson"}));
    corr_cmd->add_option("--rows", rows_filter, "Row subset: 'a:b' index range or comma-separated labels");
    detail::add_common(corr_cmd, common);
    corr_cmd->callback([&] {
        action = [&] {
            std::istringstream in(read_text(scores_path));
            auto table = read_score_table(in);
            if (!rows_filter.empty()) table = table.select_rows(detail::parse_row_filter(rows_filter, table));
            const auto m = correlation_matrix(table, parse_correlation_method(method));
            if (common.report_format() == ReportFormat::Csv) return Emission{correlation_to_csv(m)};
            auto rep = report_header("correlate");
            rep["parameters"] = {{"method", method}, {"rows", table.rows}};
            rep["inputs"] = {input_entry(scores_path)};
            rep["results"] = to_json(m);
            return Emission{serialize(rep, ReportFormat::Json)};
        };
    });

    // testbed
    std::string config_path, out_dir;
    auto* tb_cmd = app.add_subcommand("testbed", "Metrics along a synthetic training trajectory with exact KL");
    tb_cmd->add_option("--config", config_path, "Testbed configuration JSON")->required();
    tb_cmd->add_option("--out-dir", out_dir, "Directory for scores.csv and divergence.csv")->required();
    detail::add_common(tb_cmd, common);
    tb_cmd->callback([&] {
        action = [&] {
            nlohmann::json cfg_json;
            try {
                cfg_json = nlohmann::json::parse(read_text(config_path));
            } catch (const nlohmann::json::exception& e) {
                throw FormatError(std::string("testbed config: ") + e.what());
            }
            const auto cfg = TestbedConfig::from_json(cfg_json);
            std::error_code ec;
            std::filesystem::create_directories(out_dir, ec);
            if (!std::filesystem::is_directory(out_dir)) throw IoError("cannot create output directory '" + out_dir + "'");
            const auto res = run_testbed(cfg);

            const auto scores_file = std::filesystem::path(out_dir) / "scores.csv";
            const auto div_file = std::filesystem::path(out_dir) / "divergence.csv";
            write_text(scores_file, score_table_to_csv(res.scores));
            std::string div = "checkpoint,weight,kl_exact,kl_mc,kl_se,rkl_exact,rkl_mc,rkl_se\n";
            for (const auto& r : res.divergence) {
                div += r.checkpoint + "," + format_number(r.weight) + "," + format_number(r.kl_exact) + "," +
                       format_number(r.kl_mc.value) + "," + format_number(r.kl_mc.std_error) + "," + format_number(r.rkl_exact) +
                       "," + format_number(r.rkl_mc.value) + "," + format_number(r.rkl_mc.std_error) + "\n";
            }
            write_text(div_file, div);

            auto rep = report_header("testbed");
            rep["seed"] = cfg.seed;
            rep["parameters"] = cfg.to_json();
            rep["inputs"] = {input_entry(config_path)};
            rep["results"] = {{"scores", scores_file.string()},
                              {"divergence", div_file.string()},
                              {"checkpoints", res.divergence.size()},
                              {"kl_strictly_decreasing", res.kl_strictly_decreasing}};
            return Emission{serialize(rep, common.report_format())};
        };
    });

    // synth: fixture generator
    std::string synth_kind = "gaussian", synth_out, synth_backbone = "synthetic";
    std::size_t synth_rows = 1000, synth_dim = 8;
    double synth_shift = 0.0;
    auto* synth_cmd = app.add_subcommand("synth", "Write synthetic fixture files (features, probabilities, log-likelihoods)");
    synth_cmd->add_option("--kind", synth_kind)->check(CLI::IsMember({"gaussian", "mixture", "probs", "loglik-data", "loglik-model"}));
    synth_cmd->add_option("--rows", synth_rows);
    synth_cmd->add_option("--dim", synth_dim, "Feature dimension, or class count for probs");
    synth_cmd->add_option("--shift", synth_shift, "Mean shift (gaussian), half-separation (mixture), model mean (loglik)");
    synth_cmd->add_option("--backbone", synth_backbone);
    synth_cmd->add_option("--seed", seed)->required();
    synth_cmd->add_option("--path", synth_out, "Output GMF1 path")->required();
    synth_cmd->callback([&] {
        action = [&] {
            Rng rng(seed);
            const ProvenanceMeta meta{synth_backbone, "none", "synth:" + synth_kind, ""};
            const auto n = static_cast<Eigen::Index>(synth_rows);
            const auto d = static_cast<Eigen::Index>(synth_dim);
            if (synth_kind == "gaussian" || synth_kind == "mixture") {
                RowMatrix x(n, d);
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double centre = synth_kind == "gaussian" ? synth_shift : (i % 2 == 0 ? synth_shift : -synth_shift);
                    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = centre + rng.normal();
                }
                write_matrix(FeatureMatrix(std::move(x), meta), synth_out);
            } else if (synth_kind == "probs") {
                RowMatrix p(n, d);
                for (Eigen::Index i = 0; i < n; ++i) {
                    for (Eigen::Index j = 0; j < d; ++j) p(i, j) = rng.exponential();
                    p.row(i) /= p.row(i).sum();
                }
                write_matrix(ProbMatrix(std::move(p), meta), synth_out);
            } else {
                // Data N(0,1) vs model N(shift,1), exact log densities.
                const bool from_model = synth_kind == "loglik-model";
                std::vector<double> gt, mdl;
                const double c = -0.5 * std::log(2.0 * std::numbers::pi);
                for (std::size_t i = 0; i < synth_rows; ++i) {
                    const double x = rng.normal() + (from_model ? synth_shift : 0.0);
                    gt.push_back(c - 0.5 * x * x);
                    mdl.push_back(c - 0.5 * (x - synth_shift) * (x - synth_shift));
                }
                write_matrix(LogLikelihoodTable::from_columns(from_model ? SampleSource::model("model") : SampleSource::data(),
                                                              {{kGroundTruthColumn, gt}, {"model", mdl}}, meta),
                             synth_out);
            }
            auto rep = report_header("synth");
            rep["seed"] = seed;
            rep["parameters"] = {{"kind", synth_kind}, {"rows", synth_rows}, {"dim", synth_dim}, {"shift", synth_shift}};
            rep["results"] = {{"path", synth_out}, {"digest", file_digest(synth_out)}};
            return Emission{rep.dump(2) + "\n"};
        };
    });

    std::vector<const char*> argv{"gmeval"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << kToolVersion << "\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    }

    if (!action) {
        err << "error: no command\n";
        return kExitInput;
    }
    try {
        const Emission em = action();
        if (common.out.empty()) {
            out << em.text;
        } else {
            write_text(common.out, em.text);
        }
        return em.status;
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const ComputeError& e) {
        err << "error: " << e.what() << "\n";
        return kExitCompute;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitCompute;
    }
}

} // namespace gmeval::cli
