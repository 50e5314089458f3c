#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "wordrhyme/clustering.hpp"
#include "wordrhyme/error.hpp"
#include "wordrhyme/parallel.hpp"
#include "wordrhyme/unicode.hpp"

namespace wordrhyme {

/// Rhythmic similarity as an exact fraction: characters that agree when the
/// two words are aligned at their last character, over the longer length.
struct RsScore {
    std::size_t matches = 0;
    std::size_t length = 1;

    double value() const noexcept { return static_cast<double>(matches) / static_cast<double>(length); }
    double percent() const noexcept { return 100.0 * value(); }

    /// Equality of the rational values (1/2 == 3/6).
    friend bool operator==(const RsScore& a, const RsScore& b) noexcept {
        return a.matches * b.length == b.matches * a.length;
    }
};

inline RsScore rs_basic(std::u32string_view w1, std::u32string_view w2) {
    if (w1.empty() || w2.empty()) throw InvalidArgumentError("rhythmic similarity of an empty word");
    const std::size_t common = std::min(w1.size(), w2.size());
    std::size_t matches = 0;
    for (std::size_t i = 1; i <= common; ++i) {
        if (w1[w1.size() - i] == w2[w2.size() - i]) ++matches;
    }
    return {matches, std::max(w1.size(), w2.size())};
}

/// UTF-8 overload; words are compared as Unicode scalar values exactly as
/// given (corpus tokens are already case-folded).
inline RsScore rs_basic(std::string_view w1, std::string_view w2) {
    return rs_basic(std::u32string_view(unicode::decode_utf8(w1)), std::u32string_view(unicode::decode_utf8(w2)));
}

/// word -> IPA transcription. Keys are NFC-normalized and case-folded like
/// corpus tokens; transcriptions lose their stress and syllable marks.
class IpaLexicon {
public:
    IpaLexicon() = default;

    /// Adds or replaces an entry. Returns false when an existing entry was
    /// replaced.
    bool insert(std::string_view word, std::string_view ipa) {
        std::u32string transcription;
        for (char32_t c : unicode::decode_utf8(unicode::to_nfc(ipa))) {
            if (c == U'ˈ' || c == U'ˌ' || c == U'.') continue;
            transcription.push_back(c);
        }
        if (transcription.empty()) {
            throw DataError("empty IPA transcription for '" + std::string(word) + "'");
        }
        std::string key;
        for (char32_t c : unicode::decode_utf8(unicode::to_nfc(word))) unicode::append_utf8(key, unicode::fold_case(c));
        if (key.empty()) throw DataError("empty word in IPA lexicon");
        return entries_.insert_or_assign(std::move(key), std::move(transcription)).second;
    }

    const std::u32string* find(std::string_view word) const {
        const auto it = entries_.find(std::string(word));
        return it == entries_.end() ? nullptr : &it->second;
    }

    const std::u32string& at(std::string_view word) const {
        if (const auto* t = find(word)) return *t;
        throw LookupError(std::string(word));
    }

    std::size_t size() const noexcept { return entries_.size(); }

    /// Messages about duplicate words seen while loading.
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }

    /// Parses `word<TAB>ipa` lines; blank lines and lines starting with '#'
    /// are skipped. Duplicate words: the last entry wins.
    static IpaLexicon parse(std::istream& is) {
        IpaLexicon lex;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(is, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line.front() == '#') continue;
            const auto tab = line.find('\t');
            if (tab == std::string::npos) {
                throw DataError("lexicon line " + std::to_string(line_no) + ": expected word<TAB>ipa");
            }
            try {
                if (!lex.insert(std::string_view(line).substr(0, tab), std::string_view(line).substr(tab + 1))) {
                    lex.warnings_.push_back("line " + std::to_string(line_no) + ": duplicate entry for '" +
                                            line.substr(0, tab) + "', keeping the last one");
                }
            } catch (const IngestionError& e) {
                throw DataError("lexicon line " + std::to_string(line_no) + ": " + e.what());
            }
        }
        return lex;
    }

    static IpaLexicon load(const std::filesystem::path& path) {
        std::ifstream is(path, std::ios::binary);
        if (!is) throw DataError("cannot open '" + path.string() + "'");
        return parse(is);
    }

private:
    std::unordered_map<std::string, std::u32string> entries_;
    std::vector<std::string> warnings_;
};

/// rs_basic over the IPA transcriptions of both words.
inline RsScore rs_ipa(std::string_view w1, std::string_view w2, const IpaLexicon& lex) {
    return rs_basic(std::u32string_view(lex.at(w1)), std::u32string_view(lex.at(w2)));
}

struct ClusterScore {
    std::size_t n_words = 0;
    std::size_t n_pairs = 0;
    /// Mean RS over all unordered pairs, in [0, 1]; 0 for excluded clusters.
    double mean_rs = 0.0;
    /// Clusters with fewer than two words have no pairs.
    bool excluded = true;
};

/// Mean of `metric` over all n(n-1)/2 unordered pairs of `words`.
template <typename Metric>
ClusterScore cluster_mean_rs(std::span<const std::string> words, Metric&& metric) {
    ClusterScore score;
    score.n_words = words.size();
    if (words.size() < 2) return score;
    double sum = 0.0;
    for (std::size_t x = 0; x < words.size(); ++x) {
        for (std::size_t y = x + 1; y < words.size(); ++y) sum += metric(words[x], words[y]).value();
    }
    score.n_pairs = words.size() * (words.size() - 1) / 2;
    score.mean_rs = sum / static_cast<double>(score.n_pairs);
    score.excluded = false;
    return score;
}

/// Unweighted mean of the included per-cluster values.
inline double corpus_mean_rs(std::span<const double> per_cluster, const std::vector<bool>& excluded) {
    if (per_cluster.size() != excluded.size()) {
        throw InvalidArgumentError("score and exclusion lists differ in length");
    }
    double sum = 0.0;
    std::size_t included = 0;
    for (std::size_t i = 0; i < per_cluster.size(); ++i) {
        if (excluded[i]) continue;
        sum += per_cluster[i];
        ++included;
    }
    if (included == 0) throw DegenerateInputError("every cluster is excluded (fewer than two words)");
    return sum / static_cast<double>(included);
}

inline double corpus_mean_rs(std::span<const ClusterScore> clusters) {
    double sum = 0.0;
    std::size_t included = 0;
    for (const auto& c : clusters) {
        if (c.excluded) continue;
        sum += c.mean_rs;
        ++included;
    }
    if (included == 0) throw DegenerateInputError("every cluster is excluded (fewer than two words)");
    return sum / static_cast<double>(included);
}

enum class MetricKind { basic, ipa };

inline std::string_view to_string(MetricKind m) { return m == MetricKind::basic ? "basic" : "ipa"; }

inline MetricKind parse_metric(std::string_view s) {
    if (s == "basic") return MetricKind::basic;
    if (s == "ipa") return MetricKind::ipa;
    throw ConfigError("unknown metric '" + std::string(s) + "' (expected basic|ipa)");
}

struct ClusterRsSummary {
    std::vector<ClusterScore> per_cluster;
    double corpus_mean = 0.0;
    std::size_t excluded_clusters = 0;
    MetricKind metric = MetricKind::basic;
    /// Pairs scored with rs_basic because a word had no IPA entry.
    std::uint64_t fallback_pairs = 0;
    std::uint64_t total_pairs = 0;

    double fallback_rate() const noexcept {
        return total_pairs == 0 ? 0.0 : static_cast<double>(fallback_pairs) / static_cast<double>(total_pairs);
    }
};

/// Scores every cluster (in parallel across clusters when threads > 1) and
/// the corpus mean. With the IPA metric, a pair involving a word missing from
/// the lexicon is scored with rs_basic on the spellings and counted as a
/// fallback.
inline ClusterRsSummary evaluate_clustering(const Clustering& clustering, MetricKind metric = MetricKind::basic,
                                            const IpaLexicon* lexicon = nullptr, std::size_t threads = 1) {
    if (metric == MetricKind::ipa && lexicon == nullptr) {
        throw ConfigError("the ipa metric needs a lexicon");
    }
    const auto& words = clustering.words();
    std::vector<std::u32string> spelled(words.size());
    std::vector<const std::u32string*> ipa(words.size(), nullptr);
    for (std::size_t i = 0; i < words.size(); ++i) {
        spelled[i] = unicode::decode_utf8(words[i]);
        if (spelled[i].empty()) throw InvalidArgumentError("empty word in clustering");
        if (metric == MetricKind::ipa) ipa[i] = lexicon->find(words[i]);
    }

    ClusterRsSummary summary;
    summary.metric = metric;
    summary.per_cluster.resize(clustering.k());
    std::vector<std::uint64_t> fallbacks(clustering.k(), 0);
    detail::parallel_for(clustering.k(), threads, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t c = begin; c < end; ++c) {
            const auto ids = clustering.members(c);
            ClusterScore& score = summary.per_cluster[c];
            score.n_words = ids.size();
            if (ids.size() < 2) continue;
            double sum = 0.0;
            std::uint64_t fb = 0;
            for (std::size_t x = 0; x < ids.size(); ++x) {
                for (std::size_t y = x + 1; y < ids.size(); ++y) {
                    const auto* a = ipa[ids[x]];
                    const auto* b = ipa[ids[y]];
                    RsScore s;
                    if (metric == MetricKind::ipa && a && b) {
                        s = rs_basic(*a, *b);
                    } else {
                        s = rs_basic(spelled[ids[x]], spelled[ids[y]]);
                        if (metric == MetricKind::ipa) ++fb;
                    }
                    sum += s.value();
                }
            }
            score.n_pairs = ids.size() * (ids.size() - 1) / 2;
            score.mean_rs = sum / static_cast<double>(score.n_pairs);
            score.excluded = false;
            fallbacks[c] = fb;
        }
    });
    for (std::size_t c = 0; c < clustering.k(); ++c) {
        const auto& s = summary.per_cluster[c];
        if (s.excluded) ++summary.excluded_clusters;
        summary.total_pairs += s.n_pairs;
        summary.fallback_pairs += fallbacks[c];
    }
    summary.corpus_mean = corpus_mean_rs(summary.per_cluster);
    return summary;
}

}  // namespace wordrhyme
