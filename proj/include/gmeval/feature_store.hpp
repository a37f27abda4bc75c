#pragma once

// In-memory containers for the numeric artifacts exchanged between the
// extractor and the metric engine, plus the GMF1 on-disk format.
//
// GMF1 layout (all little-endian):
//   offset 0   4 bytes  magic "GMF1"
//   offset 4   u32      format version (= 1)
//   offset 8   u8       kind (0 = feature, 1 = prob, 2 = loglik)
//   offset 9   u64      rows
//   offset 17  u64      cols
//   offset 25  rows*cols IEEE-754 binary32, row-major
// Provenance lives in a JSON sidecar at "<path>.meta.json".

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "gmeval/errors.hpp"

namespace gmeval {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr std::array<char, 4> kGmfMagic{'G', 'M', 'F', '1'};
inline constexpr std::uint32_t kGmfVersion = 1;
inline constexpr std::size_t kGmfHeaderBytes = 25;
inline constexpr double kRowSumTolerance = 1e-6;

enum class MatrixKind : std::uint8_t { Feature = 0, Prob = 1, LogLik = 2 };

struct ProvenanceMeta {
    std::string backbone = "synthetic";
    std::string preprocessing = "none";
    std::string source_id;
    std::string creation_time;

    void validate() const {
        if (backbone.empty()) throw DataError("provenance: backbone must be non-empty");
        if (preprocessing.empty()) throw DataError("provenance: preprocessing must be non-empty");
    }

    friend bool operator==(const ProvenanceMeta&, const ProvenanceMeta&) = default;
};

// Dimension pinned by well-known backbones; nullopt for free-form ones.
inline std::optional<std::size_t> expected_dimension(const std::string& backbone) {
    if (backbone == "inception-pool3") return 2048;
    if (backbone == "clip-image") return 512;
    return std::nullopt;
}

namespace detail {

inline void require_finite(const RowMatrix& m, const char* what) {
    if (!m.allFinite()) throw DataError(std::string(what) + ": non-finite value");
}

inline void require_shape(const RowMatrix& m, const char* what) {
    if (m.rows() < 1 || m.cols() < 1) throw DataError(std::string(what) + ": empty matrix");
}

} // namespace detail

// N x d embedding matrix, rows are samples.
class FeatureMatrix {
public:
    explicit FeatureMatrix(RowMatrix data, ProvenanceMeta meta = {})
        : data_(std::move(data)), meta_(std::move(meta)) {
        detail::require_shape(data_, "feature matrix");
        detail::require_finite(data_, "feature matrix");
        meta_.validate();
        if (auto d = expected_dimension(meta_.backbone); d && *d != cols()) {
            throw DataError("feature matrix: backbone '" + meta_.backbone + "' requires d = " +
                            std::to_string(*d) + ", got " + std::to_string(cols()));
        }
    }

    std::size_t rows() const { return static_cast<std::size_t>(data_.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(data_.cols()); }
    const RowMatrix& data() const { return data_; }
    const ProvenanceMeta& meta() const { return meta_; }

    // Rows at the given indices, in that order.
    FeatureMatrix subset(const std::vector<std::size_t>& idx) const {
        RowMatrix out(static_cast<Eigen::Index>(idx.size()), data_.cols());
        for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = data_.row(static_cast<Eigen::Index>(idx[i]));
        return FeatureMatrix(std::move(out), meta_);
    }

private:
    RowMatrix data_;
    ProvenanceMeta meta_;
};

// N x C conditional class probabilities; every row is a distribution.
class ProbMatrix {
public:
    explicit ProbMatrix(RowMatrix data, ProvenanceMeta meta = {})
        : data_(std::move(data)), meta_(std::move(meta)) {
        detail::require_shape(data_, "prob matrix");
        detail::require_finite(data_, "prob matrix");
        meta_.validate();
        if ((data_.array() < 0.0).any() || (data_.array() > 1.0).any()) {
            throw DataError("prob matrix: entries must lie in [0, 1]");
        }
        for (Eigen::Index i = 0; i < data_.rows(); ++i) {
            const double s = data_.row(i).sum();
            if (std::abs(s - 1.0) > kRowSumTolerance) {
                throw DataError("prob matrix: row " + std::to_string(i) + " sums to " + std::to_string(s));
            }
        }
    }

    std::size_t rows() const { return static_cast<std::size_t>(data_.rows()); }
    std::size_t classes() const { return static_cast<std::size_t>(data_.cols()); }
    std::size_t cols() const { return classes(); }
    const RowMatrix& data() const { return data_; }
    const ProvenanceMeta& meta() const { return meta_; }

    ProbMatrix subset(const std::vector<std::size_t>& idx) const {
        RowMatrix out(static_cast<Eigen::Index>(idx.size()), data_.cols());
        for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = data_.row(static_cast<Eigen::Index>(idx[i]));
        return ProbMatrix(std::move(out), meta_);
    }

private:
    RowMatrix data_;
    ProvenanceMeta meta_;
};

// Which distribution the table's rows were sampled from.
struct SampleSource {
    enum class Kind { DataSamples, ModelSamples };
    Kind kind = Kind::DataSamples;
    std::string model_id;

    static SampleSource data() { return {}; }
    static SampleSource model(std::string id) { return {Kind::ModelSamples, std::move(id)}; }

    std::string to_string() const { return kind == Kind::DataSamples ? "data" : "model:" + model_id; }

    static SampleSource parse(const std::string& s) {
        if (s == "data") return data();
        if (s.rfind("model:", 0) == 0 && s.size() > 6) return model(s.substr(6));
        throw FormatError("unrecognized sample source '" + s + "'");
    }

    friend bool operator==(const SampleSource&, const SampleSource&) = default;
};

inline constexpr const char* kGroundTruthColumn = "ground-truth";

// Per-sample log-likelihoods (nats) under several models, one named column each.
class LogLikelihoodTable {
public:
    LogLikelihoodTable(SampleSource source, std::vector<std::string> names, RowMatrix values,
                       ProvenanceMeta meta = {})
        : source_(std::move(source)), names_(std::move(names)), values_(std::move(values)), meta_(std::move(meta)) {
        detail::require_shape(values_, "log-likelihood table");
        detail::require_finite(values_, "log-likelihood table");
        meta_.validate();
        if (names_.size() != cols()) throw DataError("log-likelihood table: column name count mismatch");
        for (std::size_t i = 0; i < names_.size(); ++i) {
            for (std::size_t j = i + 1; j < names_.size(); ++j) {
                if (names_[i] == names_[j]) throw DataError("log-likelihood table: duplicate column '" + names_[i] + "'");
            }
        }
    }

    // Builds a table from equally long columns.
    static LogLikelihoodTable from_columns(SampleSource source,
                                           const std::vector<std::pair<std::string, std::vector<double>>>& columns,
                                           ProvenanceMeta meta = {}) {
        if (columns.empty()) throw DataError("log-likelihood table: no columns");
        const std::size_t n = columns.front().second.size();
        RowMatrix values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(columns.size()));
        std::vector<std::string> names;
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (columns[c].second.size() != n) throw DataError("log-likelihood table: columns differ in length");
            names.push_back(columns[c].first);
            for (std::size_t r = 0; r < n; ++r) values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = columns[c].second[r];
        }
        return LogLikelihoodTable(std::move(source), std::move(names), std::move(values), std::move(meta));
    }

    std::size_t rows() const { return static_cast<std::size_t>(values_.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(values_.cols()); }
    const SampleSource& source() const { return source_; }
    const std::vector<std::string>& names() const { return names_; }
    const RowMatrix& data() const { return values_; }
    const ProvenanceMeta& meta() const { return meta_; }

    bool has_column(const std::string& name) const { return find(name).has_value(); }

    Eigen::VectorXd column(const std::string& name) const {
        auto idx = find(name);
        if (!idx) throw UsageError("log-likelihood table: no column named '" + name + "'");
        return values_.col(static_cast<Eigen::Index>(*idx));
    }

private:
    std::optional<std::size_t> find(const std::string& name) const {
        for (std::size_t i = 0; i < names_.size(); ++i) {
            if (names_[i] == name) return i;
        }
        return std::nullopt;
    }

    SampleSource source_;
    std::vector<std::string> names_;
    RowMatrix values_;
    ProvenanceMeta meta_;
};

using MatrixFile = std::variant<FeatureMatrix, ProbMatrix, LogLikelihoodTable>;

inline std::filesystem::path sidecar_path(const std::filesystem::path& path) {
    return std::filesystem::path(path.string() + ".meta.json");
}

namespace detail {

template <typename T>
void put_le(std::vector<unsigned char>& out, T value) {
    for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<unsigned char>((value >> (8 * i)) & 0xff));
}

template <typename T>
T get_le(const unsigned char* p) {
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(p[i]) << (8 * i);
    return v;
}

inline std::vector<unsigned char> encode(MatrixKind kind, const RowMatrix& m) {
    std::vector<unsigned char> out;
    out.reserve(kGmfHeaderBytes + 4 * static_cast<std::size_t>(m.size()));
    out.insert(out.end(), kGmfMagic.begin(), kGmfMagic.end());
    put_le<std::uint32_t>(out, kGmfVersion);
    out.push_back(static_cast<unsigned char>(kind));
    put_le<std::uint64_t>(out, static_cast<std::uint64_t>(m.rows()));
    put_le<std::uint64_t>(out, static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            const auto f = static_cast<float>(m(r, c));
            if (!std::isfinite(f)) throw DataError("value not representable as finite binary32");
            put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(f));
        }
    }
    return out;
}

inline nlohmann::json meta_to_json(const ProvenanceMeta& meta) {
    return {{"backbone", meta.backbone},
            {"preprocessing", meta.preprocessing},
            {"source-id", meta.source_id},
            {"creation-time", meta.creation_time}};
}

inline ProvenanceMeta meta_from_json(const nlohmann::json& j) {
    ProvenanceMeta meta;
    try {
        meta.backbone = j.at("backbone").get<std::string>();
        meta.preprocessing = j.at("preprocessing").get<std::string>();
        meta.source_id = j.value("source-id", std::string{});
        meta.creation_time = j.value("creation-time", std::string{});
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("sidecar: ") + e.what());
    }
    return meta;
}

inline void write_bytes(const std::filesystem::path& path, const std::string_view bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

inline void write_file(const std::filesystem::path& path, MatrixKind kind, const RowMatrix& m, const nlohmann::json& sidecar) {
    const auto parent = path.parent_path();
    if (!parent.empty() && !std::filesystem::is_directory(parent)) {
        throw IoError("parent directory '" + parent.string() + "' does not exist");
    }
    const auto bytes = encode(kind, m);
    write_bytes(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
    write_bytes(sidecar_path(path), sidecar.dump(2) + "\n");
}

} // namespace detail

inline void write_matrix(const FeatureMatrix& m, const std::filesystem::path& path) {
    detail::write_file(path, MatrixKind::Feature, m.data(), detail::meta_to_json(m.meta()));
}

inline void write_matrix(const ProbMatrix& m, const std::filesystem::path& path) {
    detail::write_file(path, MatrixKind::Prob, m.data(), detail::meta_to_json(m.meta()));
}

inline void write_matrix(const LogLikelihoodTable& t, const std::filesystem::path& path) {
    auto sidecar = detail::meta_to_json(t.meta());
    sidecar["columns"] = t.names();
    sidecar["sample-source"] = t.source().to_string();
    detail::write_file(path, MatrixKind::LogLik, t.data(), sidecar);
}

inline MatrixFile read_matrix(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (bytes.size() < kGmfHeaderBytes) throw FormatError("'" + path.string() + "': truncated header");
    if (!std::equal(kGmfMagic.begin(), kGmfMagic.end(), bytes.begin())) {
        throw FormatError("'" + path.string() + "': bad magic");
    }
    const auto version = detail::get_le<std::uint32_t>(bytes.data() + 4);
    if (version != kGmfVersion) throw FormatError("'" + path.string() + "': unsupported version " + std::to_string(version));
    const auto kind_byte = bytes[8];
    if (kind_byte > 2) throw FormatError("'" + path.string() + "': unknown kind " + std::to_string(kind_byte));
    const auto rows = detail::get_le<std::uint64_t>(bytes.data() + 9);
    const auto cols = detail::get_le<std::uint64_t>(bytes.data() + 17);
    if (rows == 0 || cols == 0) throw FormatError("'" + path.string() + "': empty matrix");
    if (cols > (bytes.size() - kGmfHeaderBytes) / 4 / rows || bytes.size() != kGmfHeaderBytes + 4 * rows * cols) {
        throw FormatError("'" + path.string() + "': payload size does not match header");
    }

    RowMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    const unsigned char* p = bytes.data() + kGmfHeaderBytes;
    for (std::uint64_t r = 0; r < rows; ++r) {
        for (std::uint64_t c = 0; c < cols; ++c, p += 4) {
            const float f = std::bit_cast<float>(detail::get_le<std::uint32_t>(p));
            if (!std::isfinite(f)) throw DataError("'" + path.string() + "': non-finite payload value");
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = f;
        }
    }

    std::ifstream side(sidecar_path(path));
    if (!side) throw FormatError("'" + path.string() + "': missing sidecar " + sidecar_path(path).string());
    nlohmann::json sidecar;
    try {
        side >> sidecar;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("'" + sidecar_path(path).string() + "': " + e.what());
    }
    ProvenanceMeta meta = detail::meta_from_json(sidecar);

    switch (static_cast<MatrixKind>(kind_byte)) {
    case MatrixKind::Feature:
        return FeatureMatrix(std::move(m), std::move(meta));
    case MatrixKind::Prob:
        return ProbMatrix(std::move(m), std::move(meta));
    case MatrixKind::LogLik: {
        std::vector<std::string> names;
        std::string source;
        try {
            names = sidecar.at("columns").get<std::vector<std::string>>();
            source = sidecar.at("sample-source").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw FormatError("'" + sidecar_path(path).string() + "': " + e.what());
        }
        if (names.size() != cols) throw FormatError("'" + path.string() + "': column names do not match cols");
        return LogLikelihoodTable(SampleSource::parse(source), std::move(names), std::move(m), std::move(meta));
    }
    }
    throw FormatError("unreachable");
}

namespace detail {

template <typename T>
T read_as(const std::filesystem::path& path, const char* what) {
    auto file = read_matrix(path);
    if (auto* m = std::get_if<T>(&file)) return std::move(*m);
    throw FormatError("'" + path.string() + "' is not a " + what + " file");
}

} // namespace detail

inline FeatureMatrix read_features(const std::filesystem::path& path) {
    return detail::read_as<FeatureMatrix>(path, "feature");
}

inline ProbMatrix read_probs(const std::filesystem::path& path) {
    return detail::read_as<ProbMatrix>(path, "probability");
}

inline LogLikelihoodTable read_loglik(const std::filesystem::path& path) {
    return detail::read_as<LogLikelihoodTable>(path, "log-likelihood");
}

} // namespace gmeval
