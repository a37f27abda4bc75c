#pragma once

// Machine-readable reports. Every report is a JSON object; the CSV form is
// the same object flattened to dotted "key,value" rows, so both carry
// identical numbers.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gmeval/divergence.hpp"
#include "gmeval/errors.hpp"
#include "gmeval/extrapolation.hpp"
#include "gmeval/gaussian.hpp"
#include "gmeval/inception_score.hpp"
#include "gmeval/kernel.hpp"
#include "gmeval/stat_tests.hpp"

namespace gmeval {

inline constexpr const char* kToolName = "gmeval";
inline constexpr const char* kToolVersion = "0.1.0";

enum class ReportFormat { Json, Csv };

// 64-bit FNV-1a of a file's bytes, as "fnv1a64:<16 hex digits>".
inline std::string file_digest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof(buf));
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
    }
    std::ostringstream os;
    os << "fnv1a64:" << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

// Shortest round-trip text for a double (same as the JSON serializer).
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return nlohmann::json(v).dump();
}

namespace detail {

inline std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline void flatten(const nlohmann::json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
    const auto key = [&](const std::string& k) { return prefix.empty() ? k : prefix + "." + k; };
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) flatten(v, key(k), out);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], key(std::to_string(i)), out);
    } else if (j.is_string()) {
        out.emplace_back(prefix, j.get<std::string>());
    } else if (j.is_null()) {
        out.emplace_back(prefix, "");
    } else {
        out.emplace_back(prefix, j.dump());
    }
}

} // namespace detail

inline std::string report_to_csv(const nlohmann::json& report) {
    std::vector<std::pair<std::string, std::string>> rows;
    detail::flatten(report, "", rows);
    std::string out = "key,value\n";
    for (const auto& [k, v] : rows) out += detail::csv_cell(k) + "," + detail::csv_cell(v) + "\n";
    return out;
}

inline std::string serialize(const nlohmann::json& report, ReportFormat fmt) {
    return fmt == ReportFormat::Json ? report.dump(2) + "\n" : report_to_csv(report);
}

inline nlohmann::json report_header(const std::string& command) {
    return {{"tool", kToolName}, {"version", kToolVersion}, {"command", command}, {"seed", nullptr},
            {"parameters", nlohmann::json::object()}, {"inputs", nlohmann::json::array()}};
}

inline nlohmann::json input_entry(const std::filesystem::path& path, const ProvenanceMeta* meta = nullptr) {
    nlohmann::json j{{"path", path.string()}, {"digest", file_digest(path)}};
    if (meta) j["provenance"] = {{"backbone", meta->backbone}, {"preprocessing", meta->preprocessing}, {"source-id", meta->source_id}};
    return j;
}

inline nlohmann::json to_json(const KidResult& r) {
    return {{"mean", r.mean}, {"std", r.std}, {"subset_size", r.subset_size}, {"n_subsets", r.n_subsets}};
}

inline nlohmann::json to_json(const IsResult& r) {
    return {{"mean", r.mean}, {"std", r.std}, {"n_splits", r.n_splits}, {"split_scores", r.split_scores}};
}

inline nlohmann::json to_json(const ExtrapolationCurve& c) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : c.points) pts.push_back({{"n", p.n}, {"score", p.score}});
    return {{"intercept", c.intercept}, {"slope", c.slope}, {"r2", c.r2}, {"points", pts}};
}

inline nlohmann::json to_json(const DivergenceEstimate& e) {
    return {{"value", e.value}, {"std_error", e.std_error}, {"n", e.n}, {"direction", to_string(e.direction)}};
}

inline nlohmann::json to_json(const NormalityReport& r) {
    return {{"mean_p", r.mean_p},
            {"T", r.T},
            {"seed", r.seed},
            {"d", r.d},
            {"per_projection_p", r.per_projection_p},
            {"extensions", {{"median_p", r.median_p}, {"fraction_p_below_0.05", r.fraction_below_005}}}};
}

inline nlohmann::json to_json(const LikelihoodRanking& r) {
    const auto list = [](const std::vector<ScoredIndex>& v) {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& s : v) a.push_back({{"index", s.index}, {"log_density", s.score}});
        return a;
    };
    return {{"lowest", list(r.lowest)}, {"highest", list(r.highest)}};
}

inline nlohmann::json to_json(const CorrelationMatrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.values.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.values.cols(); ++j) {
            const double v = m.values(i, j);
            if (std::isnan(v)) {
                row.push_back(nullptr);
            } else {
                row.push_back(v);
            }
        }
        rows.push_back(row);
    }
    nlohmann::json undef = nlohmann::json::array();
    for (const auto& [i, j] : m.undefined) undef.push_back({m.labels[i], m.labels[j]});
    return {{"method", to_string(m.method)}, {"labels", m.labels}, {"matrix", rows}, {"undefined", undef}};
}

inline std::string correlation_to_csv(const CorrelationMatrix& m) {
    std::string out = "metric";
    for (const auto& l : m.labels) out += "," + detail::csv_cell(l);
    out += "\n";
    for (Eigen::Index i = 0; i < m.values.rows(); ++i) {
        out += detail::csv_cell(m.labels[static_cast<std::size_t>(i)]);
        for (Eigen::Index j = 0; j < m.values.cols(); ++j) out += "," + format_number(m.values(i, j));
        out += "\n";
    }
    return out;
}

inline std::string score_table_to_csv(const ScoreTable& t) {
    std::string out = "orientation";
    for (auto o : t.orientation) out += o == Orientation::HigherBetter ? ",higher" : ",lower";
    out += "\n" + detail::csv_cell(t.row_header);
    for (const auto& m : t.metrics) out += "," + detail::csv_cell(m);
    out += "\n";
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        out += detail::csv_cell(t.rows[i]);
        for (Eigen::Index j = 0; j < t.values.cols(); ++j) out += "," + format_number(t.values(static_cast<Eigen::Index>(i), j));
        out += "\n";
    }
    return out;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace gmeval
