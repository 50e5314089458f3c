#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wordrhyme/embedding.hpp"
#include "wordrhyme/error.hpp"
#include "wordrhyme/rhythm.hpp"

namespace wordrhyme {

inline constexpr std::size_t kHistogramBins = 100;
inline constexpr std::array<double, 4> kReportThresholds{10.0, 15.0, 25.0, 50.0};

/// Counts of cluster mean-RS percentages per unit-wide bin; bin i covers
/// [i, i+1) and 100% lands in bin 99.
struct RsHistogram {
    std::array<std::uint64_t, kHistogramBins> bins{};
    std::uint64_t total = 0;
};

inline RsHistogram build_histogram(std::span<const double> percents) {
    RsHistogram h;
    for (double p : percents) {
        if (!(p >= 0.0 && p <= 100.0)) {
            throw InvariantError("cluster score " + std::to_string(p) + "% outside [0, 100]");
        }
        auto bin = static_cast<std::size_t>(std::floor(p));
        if (bin >= kHistogramBins) bin = kHistogramBins - 1;
        ++h.bins[bin];
        ++h.total;
    }
    return h;
}

/// One line of a per-cluster score file.
struct ClusterRecord {
    std::size_t cluster_index = 0;
    std::size_t n_words = 0;
    std::size_t n_pairs = 0;
    double mean_rs_percent = 0.0;

    bool excluded() const noexcept { return n_pairs == 0; }
};

/// Metadata stored next to a per-cluster score file (`<file>.meta`).
struct RunMetadata {
    std::string vocab_fingerprint;
    MetricKind metric = MetricKind::basic;
    std::uint64_t fallback_pairs = 0;
    std::uint64_t total_pairs = 0;
};

/// Per-cluster scores of one clustering, as consumed by build_report.
struct EvaluatedRun {
    std::string corpus;
    std::string method;
    std::vector<ClusterRecord> clusters;
    RunMetadata meta;
};

/// FNV-1a over the word list in id order; identifies the vocabulary a run
/// was evaluated on.
inline std::string vocabulary_fingerprint(std::span<const std::string> words) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&](unsigned char c) {
        h ^= c;
        h *= 1099511628211ull;
    };
    for (const auto& w : words) {
        for (unsigned char c : w) mix(c);
        mix(0);
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline EvaluatedRun make_run(std::string corpus, std::string method, const ClusterRsSummary& summary,
                             std::span<const std::string> words) {
    EvaluatedRun run{std::move(corpus), std::move(method), {},
                     {vocabulary_fingerprint(words), summary.metric, summary.fallback_pairs, summary.total_pairs}};
    run.clusters.reserve(summary.per_cluster.size());
    for (std::size_t c = 0; c < summary.per_cluster.size(); ++c) {
        const auto& s = summary.per_cluster[c];
        run.clusters.push_back({c, s.n_words, s.n_pairs, s.excluded ? 0.0 : 100.0 * s.mean_rs});
    }
    return run;
}

inline constexpr std::string_view kScoresCsvHeader = "cluster_index,n_words,n_pairs,mean_rs_percent";

inline void write_scores(const std::filesystem::path& path, const EvaluatedRun& run) {
    {
        std::ofstream os(path, std::ios::binary);
        if (!os) throw DataError("cannot write '" + path.string() + "'");
        std::string line;
        os << kScoresCsvHeader << '\n';
        for (const auto& c : run.clusters) {
            line = std::to_string(c.cluster_index) + ',' + std::to_string(c.n_words) + ',' +
                   std::to_string(c.n_pairs) + ',';
            detail::append_double(line, c.mean_rs_percent);
            os << line << '\n';
        }
        if (!os) throw DataError("write failed for '" + path.string() + "'");
    }
    std::ofstream meta(path.string() + ".meta", std::ios::binary);
    if (!meta) throw DataError("cannot write '" + path.string() + ".meta'");
    meta << "vocab_fingerprint = " << run.meta.vocab_fingerprint << '\n'
         << "metric = " << to_string(run.meta.metric) << '\n'
         << "fallback_pairs = " << run.meta.fallback_pairs << '\n'
         << "total_pairs = " << run.meta.total_pairs << '\n';
}

namespace detail {

inline std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

template <typename T>
T parse_unsigned(std::string_view s, std::size_t line_no) {
    T v{};
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw DataError("line " + std::to_string(line_no) + ": bad integer '" + std::string(s) + "'");
    }
    return v;
}

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace detail

/// Reads a per-cluster score file and, when present, its `.meta` sidecar.
inline EvaluatedRun read_scores(const std::filesystem::path& path, std::string corpus, std::string method) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open '" + path.string() + "'");
    EvaluatedRun run;
    run.corpus = std::move(corpus);
    run.method = std::move(method);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line_no == 1 && line == kScoresCsvHeader) continue;
        const auto f = detail::split_commas(line);
        if (f.size() != 4) {
            throw DataError(path.string() + " line " + std::to_string(line_no) + ": expected 4 fields");
        }
        ClusterRecord rec;
        rec.cluster_index = detail::parse_unsigned<std::size_t>(f[0], line_no);
        rec.n_words = detail::parse_unsigned<std::size_t>(f[1], line_no);
        rec.n_pairs = detail::parse_unsigned<std::size_t>(f[2], line_no);
        rec.mean_rs_percent = detail::parse_double(f[3], line_no);
        if (rec.n_pairs != rec.n_words * (rec.n_words > 0 ? rec.n_words - 1 : 0) / 2) {
            throw DataError(path.string() + " line " + std::to_string(line_no) + ": n_pairs inconsistent with n_words");
        }
        run.clusters.push_back(rec);
    }
    std::ifstream meta(path.string() + ".meta", std::ios::binary);
    while (meta && std::getline(meta, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = detail::trim(std::string_view(line).substr(0, eq));
        const std::string value = detail::trim(std::string_view(line).substr(eq + 1));
        if (key == "vocab_fingerprint") run.meta.vocab_fingerprint = value;
        else if (key == "metric") run.meta.metric = parse_metric(value);
        else if (key == "fallback_pairs") run.meta.fallback_pairs = detail::parse_unsigned<std::uint64_t>(value, 0);
        else if (key == "total_pairs") run.meta.total_pairs = detail::parse_unsigned<std::uint64_t>(value, 0);
    }
    return run;
}

struct ReportRow {
    std::string corpus;
    std::string method;
    double mean_rs_percent = 0.0;
    std::size_t included_clusters = 0;
    std::size_t excluded_clusters = 0;
    std::size_t n_words = 0;
    /// Clusters whose mean RS exceeds each of kReportThresholds.
    std::array<std::size_t, kReportThresholds.size()> above{};
    MetricKind metric = MetricKind::basic;
    double fallback_rate = 0.0;
    RsHistogram histogram;
};

struct ComparisonReport {
    std::vector<ReportRow> rows;
    /// Effective configuration, in the order it was supplied.
    std::vector<std::pair<std::string, std::string>> config;

    const ReportRow* find(std::string_view corpus, std::string_view method) const {
        for (const auto& r : rows) {
            if (r.corpus == corpus && r.method == method) return &r;
        }
        return nullptr;
    }
};

/// Aggregates evaluated runs into one row per (corpus, method). All runs of
/// a corpus must share a vocabulary.
inline ComparisonReport build_report(std::span<const EvaluatedRun> runs,
                                     std::vector<std::pair<std::string, std::string>> config = {}) {
    ComparisonReport report;
    report.config = std::move(config);
    std::map<std::string, std::pair<std::string, std::size_t>> vocab_of_corpus;
    for (const auto& run : runs) {
        std::size_t words = 0;
        for (const auto& c : run.clusters) words += c.n_words;
        auto [it, inserted] = vocab_of_corpus.try_emplace(run.corpus, run.meta.vocab_fingerprint, words);
        if (!inserted) {
            const auto& [fp, n] = it->second;
            const bool fp_mismatch = !fp.empty() && !run.meta.vocab_fingerprint.empty() && fp != run.meta.vocab_fingerprint;
            if (fp_mismatch || n != words) {
                throw ConfigError("runs for corpus '" + run.corpus + "' were evaluated over different vocabularies");
            }
        }
        if (report.find(run.corpus, run.method)) {
            throw ConfigError("duplicate run for corpus '" + run.corpus + "', method '" + run.method + "'");
        }

        ReportRow row;
        row.corpus = run.corpus;
        row.method = run.method;
        row.n_words = words;
        row.metric = run.meta.metric;
        row.fallback_rate = run.meta.total_pairs == 0
                                ? 0.0
                                : static_cast<double>(run.meta.fallback_pairs) / static_cast<double>(run.meta.total_pairs);
        std::vector<double> included;
        for (const auto& c : run.clusters) {
            if (c.excluded()) {
                ++row.excluded_clusters;
                continue;
            }
            included.push_back(c.mean_rs_percent);
            for (std::size_t t = 0; t < kReportThresholds.size(); ++t) {
                if (c.mean_rs_percent > kReportThresholds[t]) ++row.above[t];
            }
        }
        row.included_clusters = included.size();
        row.histogram = build_histogram(included);
        if (row.histogram.total != row.included_clusters) {
            throw InvariantError("histogram does not account for every included cluster");
        }
        if (included.empty()) {
            throw DegenerateInputError("run '" + run.corpus + "/" + run.method + "' has no cluster with two or more words");
        }
        double sum = 0.0;
        for (double p : included) sum += p;
        row.mean_rs_percent = sum / static_cast<double>(included.size());
        report.rows.push_back(std::move(row));
    }
    return report;
}

inline std::string format_percent(double p) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", p);
    return buf;
}

/// Methods as rows, corpora as columns, means in percent with two decimals.
inline void write_summary_csv(std::ostream& os, const ComparisonReport& report) {
    std::vector<std::string> corpora, methods;
    for (const auto& r : report.rows) {
        if (std::find(corpora.begin(), corpora.end(), r.corpus) == corpora.end()) corpora.push_back(r.corpus);
        if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);
    }
    os << "method";
    for (const auto& c : corpora) os << ',' << c;
    os << '\n';
    for (const auto& m : methods) {
        os << m;
        for (const auto& c : corpora) {
            os << ',';
            if (const auto* r = report.find(c, m)) os << format_percent(r->mean_rs_percent);
        }
        os << '\n';
    }
}

/// One row per (corpus, method) with cluster counts and threshold counts.
inline void write_runs_csv(std::ostream& os, const ComparisonReport& report) {
    os << "corpus,method,mean_rs_percent,included_clusters,excluded_clusters";
    for (double t : kReportThresholds) os << ",above_" << static_cast<int>(t);
    os << ",metric,fallback_rate\n";
    for (const auto& r : report.rows) {
        os << r.corpus << ',' << r.method << ',' << format_percent(r.mean_rs_percent) << ',' << r.included_clusters
           << ',' << r.excluded_clusters;
        for (auto a : r.above) os << ',' << a;
        std::string rate;
        detail::append_double(rate, r.fallback_rate);
        os << ',' << to_string(r.metric) << ',' << rate << '\n';
    }
}

/// `bin_lower_percent,count`, 100 rows.
inline void write_histogram_csv(std::ostream& os, const RsHistogram& h) {
    os << "bin_lower_percent,count\n";
    for (std::size_t i = 0; i < kHistogramBins; ++i) os << i << ',' << h.bins[i] << '\n';
}

/// Line-oriented `key = value` file: the configuration echo followed by the
/// per-run figures.
inline void write_report_text(std::ostream& os, const ComparisonReport& report) {
    os << "# wordrhyme comparison report\n";
    for (const auto& [k, v] : report.config) os << "config." << k << " = " << v << '\n';
    for (const auto& r : report.rows) {
        const std::string p = "run." + r.corpus + "." + r.method + ".";
        std::string mean;
        detail::append_double(mean, r.mean_rs_percent);
        os << p << "mean_rs_percent = " << mean << '\n'
           << p << "words = " << r.n_words << '\n'
           << p << "included_clusters = " << r.included_clusters << '\n'
           << p << "excluded_clusters = " << r.excluded_clusters << '\n'
           << p << "metric = " << to_string(r.metric) << '\n';
        std::string rate;
        detail::append_double(rate, r.fallback_rate);
        os << p << "fallback_rate = " << rate << '\n';
        for (std::size_t t = 0; t < kReportThresholds.size(); ++t) {
            os << p << "clusters_above_" << static_cast<int>(kReportThresholds[t]) << " = " << r.above[t] << '\n';
        }
    }
}

inline std::string histogram_file_name(std::string_view corpus, std::string_view method) {
    return "hist_" + std::string(corpus) + "_" + std::string(method) + ".csv";
}

/// Writes summary.csv, runs.csv, report.txt and one histogram file per run.
inline void write_report(const std::filesystem::path& dir, const ComparisonReport& report) {
    std::filesystem::create_directories(dir);
    auto open = [&](const std::string& name) {
        std::ofstream os(dir / name, std::ios::binary);
        if (!os) throw DataError("cannot write '" + (dir / name).string() + "'");
        return os;
    };
    {
        auto os = open("summary.csv");
        write_summary_csv(os, report);
    }
    {
        auto os = open("runs.csv");
        write_runs_csv(os, report);
    }
    {
        auto os = open("report.txt");
        write_report_text(os, report);
    }
    for (const auto& r : report.rows) {
        auto os = open(histogram_file_name(r.corpus, r.method));
        write_histogram_csv(os, r.histogram);
    }
}

}  // namespace wordrhyme
