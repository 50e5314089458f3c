#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wordrhyme/corpus.hpp"
#include "wordrhyme/embedding.hpp"
#include "wordrhyme/error.hpp"
#include "wordrhyme/parallel.hpp"

namespace wordrhyme {

enum class Provenance { embedding, random };

/// A partition of a word list into k clusters. Members are kept in ascending
/// word-id order.
class Clustering {
public:
    Clustering() = default;

    Clustering(std::vector<std::string> words, std::size_t k, std::vector<std::uint32_t> assignment,
               Provenance provenance)
        : words_(std::move(words)), k_(k), assignment_(std::move(assignment)), provenance_(provenance) {
        if (assignment_.size() != words_.size()) {
            throw InvalidArgumentError("assignment size differs from the number of words");
        }
        members_.assign(k_, {});
        for (std::size_t id = 0; id < assignment_.size(); ++id) {
            if (assignment_[id] >= k_) {
                throw DataError("cluster index " + std::to_string(assignment_[id]) + " out of range for k=" +
                                std::to_string(k_));
            }
            members_[assignment_[id]].push_back(static_cast<WordId>(id));
        }
    }

    std::size_t k() const noexcept { return k_; }
    std::size_t size() const noexcept { return words_.size(); }
    Provenance provenance() const noexcept { return provenance_; }
    const std::vector<std::string>& words() const noexcept { return words_; }
    const std::vector<std::uint32_t>& assignment() const noexcept { return assignment_; }
    const std::vector<std::vector<WordId>>& members() const noexcept { return members_; }
    std::span<const WordId> members(std::size_t cluster) const { return members_.at(cluster); }

    std::vector<std::size_t> size_profile() const {
        std::vector<std::size_t> sizes;
        sizes.reserve(k_);
        for (const auto& m : members_) sizes.push_back(m.size());
        return sizes;
    }

    /// Member words of one cluster, in word-id order.
    std::vector<std::string> member_words(std::size_t cluster) const {
        std::vector<std::string> out;
        for (WordId id : members_.at(cluster)) out.push_back(words_[id]);
        return out;
    }

private:
    std::vector<std::string> words_;
    std::size_t k_ = 0;
    std::vector<std::uint32_t> assignment_;
    std::vector<std::vector<WordId>> members_;
    Provenance provenance_ = Provenance::embedding;
};

struct KMeansResult {
    Clustering clustering;
    /// Sum of member-to-centroid cosines after each iteration.
    std::vector<double> objective_history;
    std::size_t iterations = 0;
    bool converged = false;
};

namespace detail {

// Four independent accumulators; fixed order, so results are reproducible.
inline double fast_dot(const double* a, const double* b, std::size_t n) {
    double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    for (; i < n; ++i) s0 += a[i] * b[i];
    return (s0 + s1) + (s2 + s3);
}

// Below this, 1 - cos is treated as zero during seeding so rounding noise on
// duplicate vectors cannot select them as separate centers.
inline constexpr double kSeedEpsilon = 1e-12;

}  // namespace detail

/// Spherical k-means: rows and centroids are L2-normalized, words go to the
/// centroid of highest cosine (lowest index on ties) and centroids are the
/// normalized member means. Seeding is k-means++ with weight 1 - cos to the
/// nearest chosen center. An empty cluster is re-seeded with the word that
/// has the lowest cosine to its own centroid.
inline KMeansResult kmeans_cosine(const EmbeddingMatrix& emb, std::size_t k, std::size_t max_iters,
                                  std::uint64_t seed, std::size_t threads = 1) {
    const std::size_t n = emb.rows();
    const std::size_t dim = emb.dim();
    if (k < 1) throw ConfigError("k must be >= 1");
    if (max_iters < 1) throw ConfigError("max_iters must be >= 1");
    if (k > n) {
        throw ConfigError("k=" + std::to_string(k) + " exceeds the vocabulary size " + std::to_string(n));
    }

    std::vector<double> points(n * dim);
    for (std::size_t r = 0; r < n; ++r) {
        const auto row = emb.row(r);
        const double len = norm(row);
        if (len == 0.0 || !std::isfinite(len)) {
            throw UndefinedSimilarityError("zero or non-finite vector for word '" + emb.word(r) + "'");
        }
        for (std::size_t b = 0; b < dim; ++b) points[r * dim + b] = row[b] / len;
    }
    auto point = [&](std::size_t r) { return points.data() + r * dim; };

    std::mt19937_64 rng(seed);
    std::vector<double> centroids(k * dim);
    auto centroid = [&](std::size_t c) { return centroids.data() + c * dim; };

    {
        std::vector<double> best(n, -std::numeric_limits<double>::infinity());
        std::vector<double> weights(n);
        std::size_t chosen = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
        for (std::size_t c = 0;; ++c) {
            std::copy_n(point(chosen), dim, centroid(c));
            if (c + 1 == k) break;
            double total = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                best[r] = std::max(best[r], detail::fast_dot(point(r), centroid(c), dim));
                const double w = 1.0 - best[r];
                weights[r] = w > detail::kSeedEpsilon ? w : 0.0;
                total += weights[r];
            }
            if (!(total > 0.0)) {
                throw ConfigError("k=" + std::to_string(k) + " exceeds the number of distinct vectors");
            }
            chosen = std::discrete_distribution<std::size_t>(weights.begin(), weights.end())(rng);
        }
    }

    KMeansResult result;
    std::vector<std::uint32_t> assign(n, std::numeric_limits<std::uint32_t>::max());
    std::vector<std::uint32_t> next(n);
    std::vector<double> sim(n);
    std::vector<std::size_t> counts(k);
    for (std::size_t iter = 0; iter < max_iters; ++iter) {
        detail::parallel_for(n, threads, [&](std::size_t, std::size_t begin, std::size_t end) {
            for (std::size_t r = begin; r < end; ++r) {
                double best = -std::numeric_limits<double>::infinity();
                std::uint32_t arg = 0;
                for (std::size_t c = 0; c < k; ++c) {
                    const double s = detail::fast_dot(point(r), centroid(c), dim);
                    if (s > best) {
                        best = s;
                        arg = static_cast<std::uint32_t>(c);
                    }
                }
                next[r] = arg;
                sim[r] = best;
            }
        });
        bool changed = next != assign;
        assign.swap(next);

        std::fill(counts.begin(), counts.end(), 0);
        for (auto a : assign) ++counts[a];
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] != 0) continue;
            std::size_t worst = n;
            for (std::size_t r = 0; r < n; ++r) {
                if (counts[assign[r]] > 1 && (worst == n || sim[r] < sim[worst])) worst = r;
            }
            if (worst == n) throw InvariantError("no word available to re-seed an empty cluster");
            --counts[assign[worst]];
            assign[worst] = static_cast<std::uint32_t>(c);
            counts[c] = 1;
            sim[worst] = 1.0;
            std::copy_n(point(worst), dim, centroid(c));
            changed = true;
        }

        // Deterministic reduction in word-id order.
        std::vector<double> sums(k * dim, 0.0);
        for (std::size_t r = 0; r < n; ++r) {
            double* s = sums.data() + static_cast<std::size_t>(assign[r]) * dim;
            const double* p = point(r);
            for (std::size_t b = 0; b < dim; ++b) s[b] += p[b];
        }
        for (std::size_t c = 0; c < k; ++c) {
            const double* s = sums.data() + c * dim;
            const double len = std::sqrt(detail::fast_dot(s, s, dim));
            // A zero sum scores 0 against any centroid; keep the old one.
            if (len > 0.0) {
                for (std::size_t b = 0; b < dim; ++b) centroid(c)[b] = s[b] / len;
            }
        }

        double objective = 0.0;
        for (std::size_t r = 0; r < n; ++r) objective += detail::fast_dot(point(r), centroid(assign[r]), dim);
        result.objective_history.push_back(objective);
        result.iterations = iter + 1;
        if (!changed) {
            result.converged = true;
            break;
        }
    }

    result.clustering = Clustering(emb.words(), k, std::move(assign), Provenance::embedding);
    return result;
}

/// Uniformly random partition with exactly the given cluster sizes.
inline Clustering random_clustering(std::vector<std::string> words, std::span<const std::size_t> size_profile,
                                    std::uint64_t seed) {
    const std::size_t total = std::accumulate(size_profile.begin(), size_profile.end(), std::size_t{0});
    if (total != words.size()) {
        throw ConfigError("size profile sums to " + std::to_string(total) + " but there are " +
                          std::to_string(words.size()) + " words");
    }
    std::vector<WordId> order(words.size());
    std::iota(order.begin(), order.end(), WordId{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::uint32_t> assign(words.size());
    std::size_t offset = 0;
    for (std::size_t c = 0; c < size_profile.size(); ++c) {
        for (std::size_t i = 0; i < size_profile[c]; ++i) assign[order[offset + i]] = static_cast<std::uint32_t>(c);
        offset += size_profile[c];
    }
    return Clustering(std::move(words), size_profile.size(), std::move(assign), Provenance::random);
}

inline Clustering random_clustering(const Vocabulary& vocab, std::span<const std::size_t> size_profile,
                                    std::uint64_t seed) {
    return random_clustering(vocab.words(), size_profile, seed);
}

inline constexpr std::string_view kClusterCsvHeader = "word,cluster_index";

inline void write_clustering(std::ostream& os, const Clustering& clustering) {
    os << kClusterCsvHeader << '\n';
    for (std::size_t id = 0; id < clustering.size(); ++id) {
        os << clustering.words()[id] << ',' << clustering.assignment()[id] << '\n';
    }
}

inline void write_clustering(const std::filesystem::path& path, const Clustering& clustering) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot write '" + path.string() + "'");
    write_clustering(os, clustering);
    if (!os) throw DataError("write failed for '" + path.string() + "'");
}

/// Reads `word,cluster_index` rows. k is taken as max index + 1 unless a
/// larger value is supplied.
inline Clustering read_clustering(std::istream& is, Provenance provenance = Provenance::embedding,
                                  std::size_t k = 0) {
    std::vector<std::string> words;
    std::vector<std::uint32_t> assign;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line_no == 1 && line == kClusterCsvHeader) continue;
        const auto comma = line.rfind(',');
        if (comma == std::string::npos || comma == 0) {
            throw DataError("line " + std::to_string(line_no) + ": expected word,cluster_index");
        }
        std::uint32_t c = 0;
        const char* first = line.data() + comma + 1;
        const char* last = line.data() + line.size();
        const auto res = std::from_chars(first, last, c);
        if (res.ec != std::errc() || res.ptr != last) {
            throw DataError("line " + std::to_string(line_no) + ": bad cluster index");
        }
        words.push_back(line.substr(0, comma));
        assign.push_back(c);
    }
    std::size_t max_k = 0;
    for (auto c : assign) max_k = std::max<std::size_t>(max_k, c + 1);
    (void)Vocabulary::from_words(words);
    return Clustering(std::move(words), std::max(k, max_k), std::move(assign), provenance);
}

inline Clustering read_clustering(const std::filesystem::path& path, Provenance provenance = Provenance::embedding) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open '" + path.string() + "'");
    return read_clustering(is, provenance);
}

}  // namespace wordrhyme
