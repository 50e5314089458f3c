#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "wordrhyme/error.hpp"
#include "wordrhyme/unicode.hpp"

namespace wordrhyme {

using WordId = std::uint32_t;

struct TokenizerConfig {
    /// Record sentence boundaries at '.', '!', '?' and newlines.
    bool sentence_breaks = false;
    bool normalize_nfc = true;
};

struct TokenStream {
    std::vector<std::string> tokens;
    /// Sorted, unique positions p in (0, tokens.size()); a break at p separates
    /// token p-1 from token p.
    std::vector<std::size_t> sentence_breaks;
};

namespace detail {

inline bool is_sentence_terminator(char32_t c) {
    return c == U'.' || c == U'!' || c == U'?' || c == U'\n';
}

}  // namespace detail

/// Splits text into lowercase word tokens: maximal runs of letters and
/// combining marks, case-folded. Everything else separates tokens.
inline TokenStream tokenize_stream(std::string_view text, const TokenizerConfig& rules = {}) {
    // Validate before normalizing so error offsets refer to the caller's bytes.
    unicode::for_each_code_point(text, [](char32_t, std::size_t) {});
    const std::string normalized =
        rules.normalize_nfc ? unicode::to_nfc(text) : std::string(text);

    TokenStream out;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) {
            out.tokens.push_back(std::move(current));
            current.clear();
        }
    };
    unicode::for_each_code_point(normalized, [&](char32_t c, std::size_t) {
        if (unicode::is_letter_or_mark(c)) {
            unicode::append_utf8(current, unicode::fold_case(c));
            return;
        }
        flush();
        if (rules.sentence_breaks && detail::is_sentence_terminator(c)) {
            const std::size_t pos = out.tokens.size();
            if (pos > 0 && (out.sentence_breaks.empty() || out.sentence_breaks.back() != pos)) {
                out.sentence_breaks.push_back(pos);
            }
        }
    });
    flush();
    if (!out.sentence_breaks.empty() && out.sentence_breaks.back() == out.tokens.size()) {
        out.sentence_breaks.pop_back();
    }
    return out;
}

inline std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& rules = {}) {
    return tokenize_stream(text, rules).tokens;
}

/// Bidirectional word <-> id map with occurrence counts. Ids are dense and
/// follow first-occurrence order.
class Vocabulary {
public:
    Vocabulary() = default;

    /// Builds a vocabulary from an explicit word list (e.g. read back from an
    /// embedding file). Counts are unknown and reported as zero.
    static Vocabulary from_words(std::vector<std::string> words) {
        std::vector<std::uint64_t> counts(words.size(), 0);
        return Vocabulary(std::move(words), std::move(counts), 0);
    }

    Vocabulary(std::vector<std::string> words, std::vector<std::uint64_t> counts,
               std::uint64_t min_count)
        : words_(std::move(words)), counts_(std::move(counts)), min_count_(min_count) {
        if (words_.size() != counts_.size()) {
            throw InvalidArgumentError("vocabulary words and counts differ in length");
        }
        ids_.reserve(words_.size());
        for (std::size_t i = 0; i < words_.size(); ++i) {
            if (!ids_.emplace(words_[i], static_cast<WordId>(i)).second) {
                throw DataError("duplicate vocabulary word '" + words_[i] + "'");
            }
        }
    }

    std::size_t size() const noexcept { return words_.size(); }
    bool empty() const noexcept { return words_.empty(); }

    const std::string& word(WordId id) const { return words_.at(id); }
    std::uint64_t count(WordId id) const { return counts_.at(id); }
    std::uint64_t min_count() const noexcept { return min_count_; }

    std::optional<WordId> id(std::string_view word) const {
        const auto it = ids_.find(std::string(word));
        if (it == ids_.end()) return std::nullopt;
        return it->second;
    }
    bool contains(std::string_view word) const { return id(word).has_value(); }

    const std::vector<std::string>& words() const noexcept { return words_; }
    const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }

    friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
        return a.words_ == b.words_ && a.counts_ == b.counts_;
    }

private:
    std::vector<std::string> words_;
    std::unordered_map<std::string, WordId> ids_;
    std::vector<std::uint64_t> counts_;
    std::uint64_t min_count_ = 1;
};

inline Vocabulary build_vocabulary(std::span<const std::string> tokens, std::uint64_t min_count = 1) {
    if (min_count < 1) {
        throw ConfigError("min_count must be at least 1");
    }
    std::vector<std::string> order;
    std::unordered_map<std::string_view, std::uint64_t> counts;
    for (const auto& t : tokens) {
        auto [it, inserted] = counts.try_emplace(t, 0);
        if (inserted) order.push_back(t);
        ++it->second;
    }
    std::vector<std::string> words;
    std::vector<std::uint64_t> kept;
    for (auto& w : order) {
        const std::uint64_t c = counts.at(w);
        if (c >= min_count) {
            words.push_back(std::move(w));
            kept.push_back(c);
        }
    }
    return Vocabulary(std::move(words), std::move(kept), min_count);
}

struct TokenCorpus {
    std::vector<WordId> tokens;
    std::vector<std::size_t> sentence_breaks;

    std::size_t size() const noexcept { return tokens.size(); }
    bool empty() const noexcept { return tokens.empty(); }
};

/// Maps a token stream onto vocabulary ids. Tokens below the vocabulary's
/// min_count are dropped and break positions are shifted to match.
inline TokenCorpus make_corpus(const TokenStream& stream, const Vocabulary& vocab) {
    TokenCorpus corpus;
    corpus.tokens.reserve(stream.tokens.size());
    auto next_break = stream.sentence_breaks.begin();
    for (std::size_t i = 0; i < stream.tokens.size(); ++i) {
        while (next_break != stream.sentence_breaks.end() && *next_break <= i) {
            const std::size_t pos = corpus.tokens.size();
            if (pos > 0 && (corpus.sentence_breaks.empty() || corpus.sentence_breaks.back() != pos)) {
                corpus.sentence_breaks.push_back(pos);
            }
            ++next_break;
        }
        if (auto id = vocab.id(stream.tokens[i])) corpus.tokens.push_back(*id);
    }
    if (!corpus.sentence_breaks.empty() && corpus.sentence_breaks.back() >= corpus.tokens.size()) {
        corpus.sentence_breaks.pop_back();
    }
    return corpus;
}

struct CorpusStats {
    std::uint64_t total_tokens = 0;
    std::uint64_t unique_words = 0;
    /// Mean length in Unicode scalar values over unique words.
    double avg_word_length = 0.0;
};

inline CorpusStats corpus_stats(const TokenCorpus& corpus, const Vocabulary& vocab) {
    CorpusStats stats;
    stats.total_tokens = corpus.tokens.size();
    stats.unique_words = vocab.size();
    if (vocab.empty()) return stats;
    std::uint64_t letters = 0;
    for (const auto& w : vocab.words()) letters += unicode::length(w);
    stats.avg_word_length = static_cast<double>(letters) / static_cast<double>(vocab.size());
    return stats;
}

/// `name,total_tokens,unique_words,avg_word_length` with two decimals.
inline std::string stats_csv_row(std::string_view name, const CorpusStats& stats) {
    char avg[64];
    std::snprintf(avg, sizeof avg, "%.2f", stats.avg_word_length);
    std::ostringstream os;
    os << name << ',' << stats.total_tokens << ',' << stats.unique_words << ',' << avg;
    return os.str();
}

/// Reads a whole file as bytes.
inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open '" + path.string() + "'");
    }
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

/// Concatenates corpus files (newline-separated) and tokenizes them.
inline TokenStream load_token_stream(std::span<const std::filesystem::path> paths,
                                     const TokenizerConfig& rules = {}) {
    TokenStream all;
    for (const auto& p : paths) {
        const std::string text = read_file(p);
        TokenStream part;
        try {
            part = tokenize_stream(text, rules);
        } catch (const IngestionError& e) {
            throw IngestionError("'" + p.string() + "': invalid UTF-8 sequence", e.byte_offset());
        }
        const std::size_t base = all.tokens.size();
        if (rules.sentence_breaks && base > 0 && !part.tokens.empty()) {
            all.sentence_breaks.push_back(base);
        }
        for (std::size_t b : part.sentence_breaks) all.sentence_breaks.push_back(base + b);
        std::move(part.tokens.begin(), part.tokens.end(), std::back_inserter(all.tokens));
    }
    return all;
}

}  // namespace wordrhyme
