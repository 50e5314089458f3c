#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wordrhyme/embedding.hpp"
#include "wordrhyme/error.hpp"
#include "wordrhyme/rhythm.hpp"
#include "wordrhyme/report.hpp"

namespace wordrhyme {

/// Everything `run` needs. Defaults:
/// 100-dimensional vectors, window 15, min_count 1, k = 1000.
struct PipelineConfig {
    std::vector<std::filesystem::path> corpus;
    /// Corpus labels used in reports; defaults to each file's stem.
    std::vector<std::string> names;
    std::vector<Method> methods{Method::word2vec, Method::glove};
    /// Method whose cluster sizes the random baseline reproduces.
    Method baseline_of = Method::word2vec;
    TrainConfig train;
    std::size_t k = 1000;
    std::size_t max_iters = 100;
    std::optional<std::uint64_t> embedding_seed;
    std::optional<std::uint64_t> clustering_seed;
    std::optional<std::uint64_t> baseline_seed;
    MetricKind metric = MetricKind::basic;
    std::optional<std::filesystem::path> lexicon;
    bool sentence_breaks = false;
    std::filesystem::path out = "wordrhyme-out";

    std::string corpus_name(std::size_t i) const {
        return i < names.size() ? names[i] : corpus.at(i).stem().string();
    }
};

inline const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys{
        "corpus",      "names",      "methods",          "baseline_of",   "dim",
        "window",      "min_count",  "threads",          "w2v_mode",      "negative",
        "epochs",      "w2v_alpha",  "w2v_min_alpha",    "sample",        "x_max",
        "glove_alpha", "glove_iterations", "glove_eta",  "k",             "max_iters",
        "embedding_seed", "clustering_seed", "baseline_seed", "metric",   "lexicon",
        "sentence_breaks", "out"};
    return keys;
}

namespace detail {

inline std::string valid_keys_message() {
    std::string msg = "valid keys:";
    for (const auto& k : config_keys()) msg += ' ' + k;
    return msg;
}

inline std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    for (auto part : split_commas(s)) {
        auto t = trim(part);
        if (!t.empty()) out.push_back(std::move(t));
    }
    return out;
}

inline std::uint64_t parse_count(std::string_view key, std::string_view value) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
    if (value.empty() || res.ec != std::errc() || res.ptr != value.data() + value.size()) {
        throw UsageError("invalid value '" + std::string(value) + "' for " + std::string(key) +
                         " (expected a non-negative integer)");
    }
    return v;
}

inline std::uint64_t parse_positive(std::string_view key, std::string_view value) {
    const auto v = parse_count(key, value);
    if (v == 0) throw UsageError(std::string(key) + " must be >= 1");
    return v;
}

inline double parse_real(std::string_view key, std::string_view value, bool allow_zero) {
    double v = 0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
    if (value.empty() || res.ec != std::errc() || res.ptr != value.data() + value.size() || !std::isfinite(v) ||
        v < 0 || (!allow_zero && v == 0)) {
        throw UsageError("invalid value '" + std::string(value) + "' for " + std::string(key) +
                         (allow_zero ? " (expected a real >= 0)" : " (expected a real > 0)"));
    }
    return v;
}

inline bool parse_bool(std::string_view key, std::string_view value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    throw UsageError("invalid value '" + std::string(value) + "' for " + std::string(key) + " (expected true|false)");
}

template <typename Parse>
auto rethrow_as_usage(Parse&& parse) {
    try {
        return parse();
    } catch (const UsageError&) {
        throw;
    } catch (const ConfigError& e) {
        throw UsageError(e.what());
    }
}

inline std::string join_methods(std::span<const Method> methods) {
    std::string s;
    for (auto m : methods) {
        if (!s.empty()) s += ',';
        s += to_string(m);
    }
    return s;
}

}  // namespace detail

/// Applies one `key = value` setting.
inline void apply_setting(PipelineConfig& cfg, std::string_view key, std::string_view raw) {
    using namespace detail;
    const std::string value = trim(raw);
    auto& t = cfg.train;
    if (key == "corpus") {
        cfg.corpus.clear();
        for (auto& p : split_list(value)) cfg.corpus.emplace_back(p);
    } else if (key == "names") {
        cfg.names = split_list(value);
    } else if (key == "methods") {
        cfg.methods.clear();
        for (auto& m : split_list(value)) {
            cfg.methods.push_back(rethrow_as_usage([&] { return parse_method(m); }));
        }
        if (cfg.methods.empty()) throw UsageError("methods must name at least one method");
    } else if (key == "baseline_of") {
        cfg.baseline_of = rethrow_as_usage([&] { return parse_method(value); });
    } else if (key == "dim") {
        t.dim = parse_positive(key, value);
    } else if (key == "window") {
        t.window = parse_positive(key, value);
    } else if (key == "min_count") {
        t.min_count = parse_positive(key, value);
    } else if (key == "threads") {
        t.threads = parse_positive(key, value);
    } else if (key == "w2v_mode") {
        t.mode = rethrow_as_usage([&] { return parse_word2vec_mode(value); });
    } else if (key == "negative") {
        t.negative = parse_positive(key, value);
    } else if (key == "epochs") {
        t.epochs = parse_positive(key, value);
    } else if (key == "w2v_alpha") {
        t.w2v_alpha = parse_real(key, value, false);
    } else if (key == "w2v_min_alpha") {
        t.w2v_min_alpha = parse_real(key, value, true);
    } else if (key == "sample") {
        t.sample = parse_real(key, value, true);
    } else if (key == "x_max") {
        t.x_max = parse_real(key, value, false);
    } else if (key == "glove_alpha") {
        t.glove_alpha = parse_real(key, value, false);
    } else if (key == "glove_iterations") {
        t.glove_iterations = parse_positive(key, value);
    } else if (key == "glove_eta") {
        t.glove_eta = parse_real(key, value, false);
    } else if (key == "k") {
        cfg.k = parse_positive(key, value);
    } else if (key == "max_iters") {
        cfg.max_iters = parse_positive(key, value);
    } else if (key == "embedding_seed") {
        cfg.embedding_seed = parse_count(key, value);
    } else if (key == "clustering_seed") {
        cfg.clustering_seed = parse_count(key, value);
    } else if (key == "baseline_seed") {
        cfg.baseline_seed = parse_count(key, value);
    } else if (key == "metric") {
        cfg.metric = rethrow_as_usage([&] { return parse_metric(value); });
    } else if (key == "lexicon") {
        if (value.empty()) cfg.lexicon.reset();
        else cfg.lexicon = value;
    } else if (key == "sentence_breaks") {
        cfg.sentence_breaks = parse_bool(key, value);
    } else if (key == "out") {
        if (value.empty()) throw UsageError("out must not be empty");
        cfg.out = value;
    } else {
        throw UsageError("unknown configuration key '" + std::string(key) + "'; " + valid_keys_message());
    }
}

/// Parses `key = value` lines; '#' starts a comment line.
inline std::vector<std::pair<std::string, std::string>> read_config_file(std::istream& is) {
    std::vector<std::pair<std::string, std::string>> settings;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const std::string t = detail::trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw UsageError("config line " + std::to_string(line_no) + ": expected key = value");
        }
        settings.emplace_back(detail::trim(std::string_view(t).substr(0, eq)),
                              detail::trim(std::string_view(t).substr(eq + 1)));
    }
    return settings;
}

/// Defaults, then the config file, then flags. Seeds left unset are drawn
/// from std::random_device so the effective configuration is always complete.
inline PipelineConfig parse_config(std::span<const std::pair<std::string, std::string>> flags,
                                   const std::optional<std::filesystem::path>& file = std::nullopt) {
    PipelineConfig cfg;
    if (file) {
        std::ifstream is(*file);
        if (!is) throw UsageError("cannot open config file '" + file->string() + "'");
        for (const auto& [k, v] : read_config_file(is)) apply_setting(cfg, k, v);
    }
    for (const auto& [k, v] : flags) apply_setting(cfg, k, v);

    std::random_device entropy;
    auto draw = [&] { return (static_cast<std::uint64_t>(entropy()) << 32) | entropy(); };
    if (!cfg.embedding_seed) cfg.embedding_seed = draw();
    if (!cfg.clustering_seed) cfg.clustering_seed = draw();
    if (!cfg.baseline_seed) cfg.baseline_seed = draw();
    if (!cfg.names.empty() && cfg.names.size() != cfg.corpus.size()) {
        throw UsageError("names must list one label per corpus file");
    }
    if (cfg.metric == MetricKind::ipa && !cfg.lexicon) throw UsageError("metric = ipa requires lexicon");
    detail::rethrow_as_usage([&] {
        cfg.train.validate();
        return 0;
    });
    return cfg;
}

/// Effective configuration as `key, value` pairs in config_keys() order;
/// feeding these back through parse_config reproduces `cfg`.
inline std::vector<std::pair<std::string, std::string>> echo_config(const PipelineConfig& cfg) {
    const auto& t = cfg.train;
    auto real = [](double x) {
        std::string s;
        detail::append_double(s, x);
        return s;
    };
    std::string corpus, names;
    for (std::size_t i = 0; i < cfg.corpus.size(); ++i) {
        if (i) {
            corpus += ',';
            names += ',';
        }
        corpus += cfg.corpus[i].string();
        names += cfg.corpus_name(i);
    }
    auto seed = [](const std::optional<std::uint64_t>& s) { return s ? std::to_string(*s) : std::string(); };
    return {
        {"corpus", corpus},
        {"names", names},
        {"methods", detail::join_methods(cfg.methods)},
        {"baseline_of", std::string(to_string(cfg.baseline_of))},
        {"dim", std::to_string(t.dim)},
        {"window", std::to_string(t.window)},
        {"min_count", std::to_string(t.min_count)},
        {"threads", std::to_string(t.threads)},
        {"w2v_mode", std::string(to_string(t.mode))},
        {"negative", std::to_string(t.negative)},
        {"epochs", std::to_string(t.epochs)},
        {"w2v_alpha", real(t.w2v_alpha)},
        {"w2v_min_alpha", real(t.w2v_min_alpha)},
        {"sample", real(t.sample)},
        {"x_max", real(t.x_max)},
        {"glove_alpha", real(t.glove_alpha)},
        {"glove_iterations", std::to_string(t.glove_iterations)},
        {"glove_eta", real(t.glove_eta)},
        {"k", std::to_string(cfg.k)},
        {"max_iters", std::to_string(cfg.max_iters)},
        {"embedding_seed", seed(cfg.embedding_seed)},
        {"clustering_seed", seed(cfg.clustering_seed)},
        {"baseline_seed", seed(cfg.baseline_seed)},
        {"metric", std::string(to_string(cfg.metric))},
        {"lexicon", cfg.lexicon ? cfg.lexicon->string() : std::string()},
        {"sentence_breaks", cfg.sentence_breaks ? "true" : "false"},
        {"out", cfg.out.string()},
    };
}

}  // namespace wordrhyme
