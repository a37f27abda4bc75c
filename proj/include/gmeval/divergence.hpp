#pragma once

// Monte-Carlo KL / reverse-KL from per-sample log-likelihood tables, and a
// small categorical autoregressive test-bed whose likelihoods are exact.

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "gmeval/errors.hpp"
#include "gmeval/feature_store.hpp"
#include "gmeval/rng.hpp"

namespace gmeval {

enum class Direction { KL, RKL };

inline const char* to_string(Direction d) { return d == Direction::KL ? "KL" : "RKL"; }

struct DivergenceEstimate {
    double value = 0.0; // nats
    double std_error = 0.0;
    std::size_t n = 0;
    Direction direction = Direction::KL;
};

namespace detail {

// Mean and standard error of a - b. Accumulates offsets from the first
// difference so constant differences come out exact.
inline DivergenceEstimate mean_difference(const Eigen::VectorXd& a, const Eigen::VectorXd& b, Direction dir) {
    const auto n = static_cast<std::size_t>(a.size());
    const double base = a(0) - b(0);
    double s = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) s += (a(i) - b(i)) - base;
    const double shift = s / static_cast<double>(n);
    double ss = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        const double r = (a(i) - b(i)) - base - shift;
        ss += r * r;
    }
    DivergenceEstimate e;
    e.value = base + shift;
    e.n = n;
    e.direction = dir;
    e.std_error = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n)) : 0.0;
    return e;
}

inline void require_columns(const LogLikelihoodTable& t, const std::string& model_col) {
    if (!t.has_column(kGroundTruthColumn)) throw UsageError("log-likelihood table has no 'ground-truth' column");
    if (!t.has_column(model_col)) throw UsageError("log-likelihood table has no column '" + model_col + "'");
}

} // namespace detail

// KL(p_data || p_model) from rows sampled from the data distribution.
inline DivergenceEstimate kl_estimate(const LogLikelihoodTable& table, const std::string& model_col) {
    if (table.source().kind != SampleSource::Kind::DataSamples) {
        throw UsageError("KL needs a table sampled from the data; this one is " + table.source().to_string());
    }
    detail::require_columns(table, model_col);
    return detail::mean_difference(table.column(kGroundTruthColumn), table.column(model_col), Direction::KL);
}

// KL(p_model || p_data) from rows sampled from model_col itself.
inline DivergenceEstimate rkl_estimate(const LogLikelihoodTable& table, const std::string& model_col) {
    if (table.source().kind != SampleSource::Kind::ModelSamples || table.source().model_id != model_col) {
        throw UsageError("RKL for '" + model_col + "' needs a table sampled from that model; this one is " +
                         table.source().to_string());
    }
    detail::require_columns(table, model_col);
    return detail::mean_difference(table.column(model_col), table.column(kGroundTruthColumn), Direction::RKL);
}

inline constexpr double kLogFloor = -745.0;
inline constexpr std::uint64_t kEnumerationLimit = std::uint64_t{1} << 20;

// Fixed-length sequences stored back to back.
struct SequenceBatch {
    std::size_t length = 0;
    std::vector<int> symbols;

    std::size_t size() const { return length == 0 ? 0 : symbols.size() / length; }
    std::span<const int> operator[](std::size_t i) const { return {symbols.data() + i * length, length}; }
};

// Sequence model over an alphabet of V symbols and length L. Position t
// conditions on the previous min(t, order) symbols; its table has V^min(t, order)
// rows of V probabilities, indexed by the context read as a base-V number
// (oldest symbol most significant).
class CategoricalARModel {
public:
    CategoricalARModel(std::size_t alphabet, std::size_t length, std::size_t order, std::vector<RowMatrix> tables)
        : alphabet_(alphabet), length_(length), order_(order), tables_(std::move(tables)) {
        if (alphabet_ < 1) throw ArgumentError("AR model: alphabet must be >= 1");
        if (length_ < 1) throw ArgumentError("AR model: length must be >= 1");
        if (tables_.size() != length_) throw ArgumentError("AR model: need one table per position");
        for (std::size_t t = 0; t < length_; ++t) {
            const auto& tab = tables_[t];
            if (static_cast<std::size_t>(tab.rows()) != contexts(t) || static_cast<std::size_t>(tab.cols()) != alphabet_) {
                throw ArgumentError("AR model: table " + std::to_string(t) + " has wrong shape");
            }
            if (!tab.allFinite() || (tab.array() < 0.0).any()) throw ArgumentError("AR model: invalid probabilities");
            for (Eigen::Index r = 0; r < tab.rows(); ++r) {
                if (std::abs(tab.row(r).sum() - 1.0) > 1e-9) {
                    throw ArgumentError("AR model: row " + std::to_string(r) + " of table " + std::to_string(t) +
                                        " does not sum to 1");
                }
            }
        }
    }

    static CategoricalARModel uniform(std::size_t alphabet, std::size_t length, std::size_t order) {
        std::vector<RowMatrix> tables;
        for (std::size_t t = 0; t < length; ++t) {
            tables.push_back(RowMatrix::Constant(static_cast<Eigen::Index>(context_count(alphabet, t, order)),
                                                 static_cast<Eigen::Index>(alphabet), 1.0 / static_cast<double>(alphabet)));
        }
        return {alphabet, length, order, std::move(tables)};
    }

    // Rows are softmax(sharpness * z) with z standard normal; larger sharpness
    // gives lower-entropy conditionals.
    static CategoricalARModel random(std::size_t alphabet, std::size_t length, std::size_t order, double sharpness,
                                     std::uint64_t seed) {
        Rng rng(seed);
        std::vector<RowMatrix> tables;
        for (std::size_t t = 0; t < length; ++t) {
            RowMatrix tab(static_cast<Eigen::Index>(context_count(alphabet, t, order)), static_cast<Eigen::Index>(alphabet));
            for (Eigen::Index r = 0; r < tab.rows(); ++r) {
                for (Eigen::Index c = 0; c < tab.cols(); ++c) tab(r, c) = sharpness * rng.normal();
                const double mx = tab.row(r).maxCoeff();
                tab.row(r) = (tab.row(r).array() - mx).exp();
                tab.row(r) /= tab.row(r).sum();
            }
            tables.push_back(std::move(tab));
        }
        return {alphabet, length, order, std::move(tables)};
    }

    std::size_t alphabet() const { return alphabet_; }
    std::size_t length() const { return length_; }
    std::size_t order() const { return order_; }
    const std::vector<RowMatrix>& tables() const { return tables_; }

    std::size_t contexts(std::size_t t) const { return context_count(alphabet_, t, order_); }

    // Context index of position t given the prefix seq[0..t).
    std::size_t context_index(std::span<const int> seq, std::size_t t) const {
        const std::size_t c = std::min(t, order_);
        std::size_t idx = 0;
        for (std::size_t j = t - c; j < t; ++j) idx = idx * alphabet_ + static_cast<std::size_t>(seq[j]);
        return idx;
    }

    double prob(std::size_t t, std::size_t context, int symbol) const {
        return tables_[t](static_cast<Eigen::Index>(context), symbol);
    }

    bool same_shape(const CategoricalARModel& o) const {
        return alphabet_ == o.alphabet_ && length_ == o.length_ && order_ == o.order_;
    }

    // Every conditional row becomes (1 - w) * row + w * uniform.
    CategoricalARModel mixed_with_uniform(double w) const {
        if (!(w >= 0.0 && w <= 1.0)) throw ArgumentError("mixing weight must lie in [0, 1]");
        std::vector<RowMatrix> tables;
        const double u = 1.0 / static_cast<double>(alphabet_);
        for (const auto& tab : tables_) {
            RowMatrix mixed = (1.0 - w) * tab.array() + w * u;
            tables.push_back(std::move(mixed));
        }
        return {alphabet_, length_, order_, std::move(tables)};
    }

    nlohmann::json to_json() const {
        nlohmann::json tabs = nlohmann::json::array();
        for (const auto& tab : tables_) {
            nlohmann::json rows = nlohmann::json::array();
            for (Eigen::Index r = 0; r < tab.rows(); ++r) {
                std::vector<double> row(tab.row(r).data(), tab.row(r).data() + tab.cols());
                rows.push_back(row);
            }
            tabs.push_back(std::move(rows));
        }
        return {{"alphabet", alphabet_}, {"length", length_}, {"order", order_}, {"tables", tabs}};
    }

    static CategoricalARModel from_json(const nlohmann::json& j) {
        try {
            const auto v = j.at("alphabet").get<std::size_t>();
            const auto l = j.at("length").get<std::size_t>();
            const auto k = j.value("order", l == 0 ? std::size_t{0} : l - 1);
            std::vector<RowMatrix> tables;
            for (const auto& tj : j.at("tables")) {
                const auto rows = tj.get<std::vector<std::vector<double>>>();
                RowMatrix tab(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(v));
                for (std::size_t r = 0; r < rows.size(); ++r) {
                    if (rows[r].size() != v) throw FormatError("AR model JSON: row width does not match alphabet");
                    for (std::size_t c = 0; c < v; ++c) tab(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
                }
                tables.push_back(std::move(tab));
            }
            return {v, l, k, std::move(tables)};
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(std::string("AR model JSON: ") + e.what());
        }
    }

    static std::size_t context_count(std::size_t alphabet, std::size_t t, std::size_t order) {
        std::size_t n = 1;
        for (std::size_t i = 0; i < std::min(t, order); ++i) n *= alphabet;
        return n;
    }

private:
    std::size_t alphabet_;
    std::size_t length_;
    std::size_t order_;
    std::vector<RowMatrix> tables_;
};

struct LogLikelihoods {
    std::vector<double> values;
    std::size_t floored = 0; // sequences containing a zero-probability step
};

struct ArSamples {
    SequenceBatch sequences;
    LogLikelihoods loglik;
};

inline LogLikelihoods ar_loglik(const CategoricalARModel& m, const SequenceBatch& batch) {
    if (batch.length != m.length()) throw ArgumentError("ar_loglik: sequence length does not match model");
    LogLikelihoods out;
    out.values.reserve(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto seq = batch[i];
        double ll = 0.0;
        bool zero = false;
        for (std::size_t t = 0; t < m.length(); ++t) {
            if (seq[t] < 0 || static_cast<std::size_t>(seq[t]) >= m.alphabet()) {
                throw ArgumentError("ar_loglik: symbol " + std::to_string(seq[t]) + " outside alphabet");
            }
            const double p = m.prob(t, m.context_index(seq, t), seq[t]);
            if (p > 0.0) {
                ll += std::log(p);
            } else {
                zero = true;
            }
        }
        if (zero) {
            ll = kLogFloor;
            ++out.floored;
        }
        out.values.push_back(ll);
    }
    return out;
}

inline ArSamples ar_sample(const CategoricalARModel& m, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    ArSamples out;
    out.sequences.length = m.length();
    out.sequences.symbols.resize(n * m.length());
    out.loglik.values.reserve(n);
    const auto v = static_cast<Eigen::Index>(m.alphabet());
    for (std::size_t i = 0; i < n; ++i) {
        int* seq = out.sequences.symbols.data() + i * m.length();
        double ll = 0.0;
        for (std::size_t t = 0; t < m.length(); ++t) {
            const auto ctx = m.context_index(std::span<const int>(seq, t), t);
            const auto row = m.tables()[t].row(static_cast<Eigen::Index>(ctx));
            const auto sym = rng.categorical(std::span<const double>(row.data(), static_cast<std::size_t>(v)));
            seq[t] = static_cast<int>(sym);
            ll += std::log(row(static_cast<Eigen::Index>(sym)));
        }
        out.loglik.values.push_back(ll);
    }
    return out;
}

// Exact KL(p || q) by walking every sequence. +inf when q misses mass of p.
inline double exact_kl_enumerate(const CategoricalARModel& p, const CategoricalARModel& q) {
    if (!p.same_shape(q)) throw ArgumentError("exact_kl_enumerate: models differ in alphabet, length or order");
    double states = 1.0;
    for (std::size_t t = 0; t < p.length(); ++t) states *= static_cast<double>(p.alphabet());
    if (states > static_cast<double>(kEnumerationLimit)) {
        throw ArgumentError("exact_kl_enumerate: state space V^L exceeds 2^20");
    }
    std::vector<int> seq(p.length());
    double kl = 0.0;
    // Depth-first walk carrying the prefix probability under p and log-ratio.
    auto walk = [&](auto&& self, std::size_t t, double prob_p, double log_ratio) -> void {
        if (t == p.length()) {
            kl += prob_p * log_ratio;
            return;
        }
        const std::span<const int> prefix(seq.data(), t);
        const auto ctx = p.context_index(prefix, t);
        for (std::size_t s = 0; s < p.alphabet(); ++s) {
            const double a = p.prob(t, ctx, static_cast<int>(s));
            if (a == 0.0) continue;
            const double b = q.prob(t, ctx, static_cast<int>(s));
            if (b == 0.0) {
                kl = std::numeric_limits<double>::infinity();
                continue;
            }
            seq[t] = static_cast<int>(s);
            self(self, t + 1, prob_p * a, log_ratio + std::log(a) - std::log(b));
        }
    };
    walk(walk, 0, 1.0, 0.0);
    return kl;
}

// Checkpoint i mixes every conditional row of `target` with uniform noise at
// weight schedule[i].
inline std::vector<CategoricalARModel> testbed_trajectory(const CategoricalARModel& target, std::size_t n_checkpoints,
                                                          const std::vector<double>& schedule) {
    if (schedule.size() != n_checkpoints) throw ArgumentError("testbed_trajectory: schedule length must equal n_checkpoints");
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        if (!(schedule[i] >= 0.0 && schedule[i] <= 1.0)) throw ArgumentError("testbed_trajectory: weight outside [0, 1]");
        if (i > 0 && schedule[i] > schedule[i - 1]) throw ArgumentError("testbed_trajectory: weights must be non-increasing");
    }
    std::vector<CategoricalARModel> out;
    out.reserve(n_checkpoints);
    for (double w : schedule) out.push_back(target.mixed_with_uniform(w));
    return out;
}

// Ground-truth column from `target`, then one column per named model.
inline LogLikelihoodTable make_loglik_table(const SequenceBatch& samples, const CategoricalARModel& target,
                                            const std::vector<std::pair<std::string, const CategoricalARModel*>>& models,
                                            SampleSource source) {
    std::vector<std::pair<std::string, std::vector<double>>> cols;
    cols.emplace_back(kGroundTruthColumn, ar_loglik(target, samples).values);
    for (const auto& [name, model] : models) cols.emplace_back(name, ar_loglik(*model, samples).values);
    return LogLikelihoodTable::from_columns(std::move(source), cols);
}

} // namespace gmeval
