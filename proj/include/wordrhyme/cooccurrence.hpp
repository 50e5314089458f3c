#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <unordered_map>
#include <vector>

#include "wordrhyme/corpus.hpp"
#include "wordrhyme/error.hpp"
#include "wordrhyme/parallel.hpp"

namespace wordrhyme {

struct Cooccurrence {
    WordId word;
    WordId context;
    double value;

    friend bool operator==(const Cooccurrence&, const Cooccurrence&) = default;
};

/// Sparse X_ij, sorted by (word, context). Every stored value is > 0.
class CooccurrenceTable {
public:
    CooccurrenceTable() = default;

    CooccurrenceTable(std::size_t vocab_size, std::vector<Cooccurrence> entries)
        : vocab_size_(vocab_size), entries_(std::move(entries)) {
        std::sort(entries_.begin(), entries_.end(), [](const auto& a, const auto& b) {
            return a.word != b.word ? a.word < b.word : a.context < b.context;
        });
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            const auto& e = entries_[i];
            if (e.word >= vocab_size_ || e.context >= vocab_size_) {
                throw DataError("co-occurrence entry references id outside the vocabulary");
            }
            if (!(e.value > 0.0)) throw DataError("co-occurrence values must be positive");
            if (i > 0 && entries_[i - 1].word == e.word && entries_[i - 1].context == e.context) {
                throw DataError("duplicate co-occurrence entry");
            }
        }
    }

    std::size_t vocab_size() const noexcept { return vocab_size_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    const std::vector<Cooccurrence>& entries() const noexcept { return entries_; }

    /// X_ij, or 0 when the pair never co-occurred.
    double at(WordId word, WordId context) const {
        const auto it = std::lower_bound(
            entries_.begin(), entries_.end(), std::pair{word, context},
            [](const Cooccurrence& e, const std::pair<WordId, WordId>& key) {
                return e.word != key.first ? e.word < key.first : e.context < key.second;
            });
        if (it == entries_.end() || it->word != word || it->context != context) return 0.0;
        return it->value;
    }

private:
    std::size_t vocab_size_ = 0;
    std::vector<Cooccurrence> entries_;
};

namespace detail {

inline std::uint64_t pair_key(WordId a, WordId b) {
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace detail

/// Symmetric window counts weighted by 1/distance; windows never cross a
/// sentence break. With threads > 1 the corpus is sharded by center position
/// and shard tables are summed in shard order.
inline CooccurrenceTable build_cooccurrence(const TokenCorpus& corpus, std::size_t vocab_size,
                                            std::size_t window, std::size_t threads = 1) {
    if (window < 1) throw ConfigError("window must be >= 1");
    const auto& tokens = corpus.tokens;
    const std::size_t n = tokens.size();
    for (WordId t : tokens) {
        if (t >= vocab_size) throw DataError("corpus token id outside the vocabulary");
    }

    // segment_end[i] = first position not in i's sentence.
    std::vector<std::size_t> segment_end(n, n);
    {
        std::size_t next = 0;
        for (std::size_t i = 0; i < n; ++i) {
            while (next < corpus.sentence_breaks.size() && corpus.sentence_breaks[next] <= i) ++next;
            segment_end[i] = next < corpus.sentence_breaks.size() ? corpus.sentence_breaks[next] : n;
        }
    }

    using Shard = std::unordered_map<std::uint64_t, double>;
    const std::size_t shards = std::max<std::size_t>(1, std::min(threads, n));
    std::vector<Shard> parts(shards);
    detail::parallel_for(n, shards, [&](std::size_t shard, std::size_t begin, std::size_t end) {
        Shard& table = parts[shard];
        table.reserve((end - begin) * 4);
        for (std::size_t i = begin; i < end; ++i) {
            const std::size_t stop = std::min(segment_end[i], i + window + 1);
            for (std::size_t j = i + 1; j < stop; ++j) {
                const double w = 1.0 / static_cast<double>(j - i);
                table[detail::pair_key(tokens[i], tokens[j])] += w;
                table[detail::pair_key(tokens[j], tokens[i])] += w;
            }
        }
    });

    Shard merged = std::move(parts[0]);
    for (std::size_t s = 1; s < parts.size(); ++s) {
        for (const auto& [key, value] : parts[s]) merged[key] += value;
        Shard().swap(parts[s]);
    }
    std::vector<Cooccurrence> entries;
    entries.reserve(merged.size());
    for (const auto& [key, value] : merged) {
        entries.push_back({static_cast<WordId>(key >> 32), static_cast<WordId>(key & 0xffffffffu), value});
    }
    return CooccurrenceTable(vocab_size, std::move(entries));
}

/// Binary triples: int32 word, int32 context, float64 value, little-endian,
/// 16 bytes per record (the GloVe `cooccur` record layout).
inline void write_cooccurrence(const std::filesystem::path& path, const CooccurrenceTable& table) {
    static_assert(std::endian::native == std::endian::little, "binary co-occurrence IO assumes little-endian");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot write '" + path.string() + "'");
    char record[16];
    for (const auto& e : table.entries()) {
        const std::int32_t a = static_cast<std::int32_t>(e.word);
        const std::int32_t b = static_cast<std::int32_t>(e.context);
        std::memcpy(record, &a, 4);
        std::memcpy(record + 4, &b, 4);
        std::memcpy(record + 8, &e.value, 8);
        os.write(record, sizeof record);
    }
    if (!os) throw DataError("write failed for '" + path.string() + "'");
}

inline CooccurrenceTable read_cooccurrence(const std::filesystem::path& path, std::size_t vocab_size) {
    const std::string bytes = read_file(path);
    if (bytes.size() % 16 != 0) {
        throw DataError("'" + path.string() + "' is not a whole number of 16-byte records");
    }
    std::vector<Cooccurrence> entries(bytes.size() / 16);
    for (std::size_t i = 0; i < entries.size(); ++i) {
        std::int32_t a = 0, b = 0;
        double v = 0;
        std::memcpy(&a, bytes.data() + i * 16, 4);
        std::memcpy(&b, bytes.data() + i * 16 + 4, 4);
        std::memcpy(&v, bytes.data() + i * 16 + 8, 8);
        if (a < 0 || b < 0) throw DataError("negative id in co-occurrence record");
        entries[i] = {static_cast<WordId>(a), static_cast<WordId>(b), v};
    }
    return CooccurrenceTable(vocab_size, std::move(entries));
}

}  // namespace wordrhyme
