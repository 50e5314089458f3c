#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "wordrhyme/corpus.hpp"
#include "wordrhyme/embedding.hpp"
#include "wordrhyme/error.hpp"
#include "wordrhyme/parallel.hpp"

namespace wordrhyme {

namespace detail {

// Dot products outside this range are skipped, as in the word2vec/Gensim
// sigmoid lookup table.
inline constexpr float kMaxExp = 6.0f;

struct Word2VecState {
    std::size_t dim;
    std::vector<float> input;   // syn0
    std::vector<float> output;  // syn1neg
    std::vector<double> keep_probability;
    std::discrete_distribution<WordId> noise;
    std::uint64_t total_words;
};

template <bool Shared>
class Word2VecWorker {
public:
    using A = ParamAccess<Shared>;

    Word2VecWorker(Word2VecState& s, const TrainConfig& cfg, std::uint64_t seed)
        : s_(s), cfg_(cfg), rng_(seed), noise_(s.noise), neu1_(s.dim), work_(s.dim) {}

    /// Trains over corpus positions [begin, end) for every epoch. `segment_end`
    /// maps a position to the end of its sentence.
    void run(const TokenCorpus& corpus, const std::vector<std::size_t>& segment_end, std::size_t begin,
             std::size_t end) {
        const double span_words = static_cast<double>(end - begin);
        const double total = span_words * static_cast<double>(cfg_.epochs);
        std::vector<WordId> kept;
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        double processed = 0.0;
        for (std::size_t epoch = 0; epoch < cfg_.epochs; ++epoch) {
            std::size_t pos = begin;
            while (pos < end) {
                const std::size_t stop = std::min(end, segment_end[pos]);
                kept.clear();
                for (std::size_t i = pos; i < stop; ++i) {
                    const WordId w = corpus.tokens[i];
                    const double p = s_.keep_probability[w];
                    if (p >= 1.0 || p >= unit(rng_)) kept.push_back(w);
                }
                const double progress = total > 0 ? processed / total : 0.0;
                alpha_ = static_cast<float>(cfg_.w2v_alpha - (cfg_.w2v_alpha - cfg_.w2v_min_alpha) * progress);
                train_sentence(kept);
                processed += static_cast<double>(stop - pos);
                pos = stop;
            }
        }
    }

private:
    void train_sentence(const std::vector<WordId>& sentence) {
        const std::size_t n = sentence.size();
        const auto window = static_cast<std::ptrdiff_t>(cfg_.window);
        for (std::size_t i = 0; i < n; ++i) {
            const auto reduced = static_cast<std::ptrdiff_t>(rng_() % cfg_.window);
            const std::ptrdiff_t reach = window - reduced;
            const std::size_t lo = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(i) - reach));
            const std::size_t hi = std::min(n, i + static_cast<std::size_t>(reach) + 1);
            if (cfg_.mode == Word2VecMode::cbow) {
                cbow(sentence, i, lo, hi);
            } else {
                for (std::size_t j = lo; j < hi; ++j) {
                    if (j != i) skipgram(sentence[i], sentence[j]);
                }
            }
        }
    }

    // Negative-sampling updates of the output layer against `hidden`;
    // accumulates the hidden-layer error into work_.
    void negative_sampling(WordId target_word, const float* hidden) {
        const std::size_t dim = s_.dim;
        std::fill(work_.begin(), work_.end(), 0.0f);
        for (std::size_t d = 0; d <= cfg_.negative; ++d) {
            WordId target = target_word;
            float label = 1.0f;
            if (d > 0) {
                target = noise_(rng_);
                if (target == target_word) continue;
                label = 0.0f;
            }
            float* out = s_.output.data() + static_cast<std::size_t>(target) * dim;
            float f = 0.0f;
            for (std::size_t b = 0; b < dim; ++b) f += hidden[b] * A::load(out[b]);
            if (f <= -kMaxExp || f >= kMaxExp) continue;
            f = 1.0f / (1.0f + std::exp(-f));
            const float g = (label - f) * alpha_;
            for (std::size_t b = 0; b < dim; ++b) work_[b] += g * A::load(out[b]);
            for (std::size_t b = 0; b < dim; ++b) A::add(out[b], g * hidden[b]);
        }
    }

    void cbow(const std::vector<WordId>& sentence, std::size_t center, std::size_t lo, std::size_t hi) {
        const std::size_t dim = s_.dim;
        std::fill(neu1_.begin(), neu1_.end(), 0.0f);
        std::size_t count = 0;
        for (std::size_t j = lo; j < hi; ++j) {
            if (j == center) continue;
            const float* in = s_.input.data() + static_cast<std::size_t>(sentence[j]) * dim;
            for (std::size_t b = 0; b < dim; ++b) neu1_[b] += A::load(in[b]);
            ++count;
        }
        if (count == 0) return;
        const float inv = 1.0f / static_cast<float>(count);
        for (auto& x : neu1_) x *= inv;
        negative_sampling(sentence[center], neu1_.data());
        for (std::size_t j = lo; j < hi; ++j) {
            if (j == center) continue;
            float* in = s_.input.data() + static_cast<std::size_t>(sentence[j]) * dim;
            for (std::size_t b = 0; b < dim; ++b) A::add(in[b], work_[b]);
        }
    }

    void skipgram(WordId center, WordId context) {
        const std::size_t dim = s_.dim;
        float* in = s_.input.data() + static_cast<std::size_t>(context) * dim;
        for (std::size_t b = 0; b < dim; ++b) neu1_[b] = A::load(in[b]);
        negative_sampling(center, neu1_.data());
        for (std::size_t b = 0; b < dim; ++b) A::add(in[b], work_[b]);
    }

    Word2VecState& s_;
    const TrainConfig& cfg_;
    std::mt19937_64 rng_;
    std::discrete_distribution<WordId> noise_;
    std::vector<float> neu1_;
    std::vector<float> work_;
    float alpha_ = 0.0f;
};

}  // namespace detail

/// Word2vec with negative sampling (CBOW with averaged context, or
/// skip-gram), frequency subsampling, dynamic window shrinking and a linearly
/// decaying learning rate. Returns the input-side vectors.
///
/// threads == 1 is fully deterministic for a given seed. With more threads
/// the corpus is split into contiguous shards trained concurrently against
/// shared rows.
inline EmbeddingMatrix train_word2vec(const TokenCorpus& corpus, const Vocabulary& vocab,
                                      const TrainConfig& cfg) {
    cfg.validate();
    if (cfg.negative < 1) throw ConfigError("word2vec needs at least one negative sample");
    if (corpus.empty() || vocab.empty()) throw ConfigError("cannot train word2vec on an empty corpus");
    const std::size_t rows = vocab.size();
    const std::size_t dim = cfg.dim;

    // Counts come from the corpus itself so vocabularies read back without
    // counts still train correctly.
    std::vector<std::uint64_t> counts(rows, 0);
    for (WordId t : corpus.tokens) {
        if (t >= rows) throw DataError("corpus token id outside the vocabulary");
        ++counts[t];
    }

    detail::Word2VecState state{dim, std::vector<float>(rows * dim), std::vector<float>(rows * dim),
                                std::vector<double>(rows, 1.0), {}, corpus.size()};
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<float> init(-0.5f / static_cast<float>(dim), 0.5f / static_cast<float>(dim));
    for (auto& x : state.input) x = init(rng);
    for (auto& x : state.output) x = init(rng);

    if (cfg.sample > 0) {
        const double threshold = cfg.sample * static_cast<double>(corpus.size());
        for (std::size_t w = 0; w < rows; ++w) {
            if (counts[w] == 0) continue;
            const double v = static_cast<double>(counts[w]);
            state.keep_probability[w] = std::min(1.0, (std::sqrt(v / threshold) + 1.0) * (threshold / v));
        }
    }
    std::vector<double> noise_weights(rows);
    for (std::size_t w = 0; w < rows; ++w) {
        noise_weights[w] = std::pow(static_cast<double>(counts[w]), cfg.ns_exponent);
    }
    state.noise = std::discrete_distribution<WordId>(noise_weights.begin(), noise_weights.end());

    const std::size_t n = corpus.size();
    std::vector<std::size_t> segment_end(n, n);
    {
        std::size_t next = 0;
        for (std::size_t i = 0; i < n; ++i) {
            while (next < corpus.sentence_breaks.size() && corpus.sentence_breaks[next] <= i) ++next;
            segment_end[i] = next < corpus.sentence_breaks.size() ? corpus.sentence_breaks[next] : n;
        }
    }

    const std::size_t workers = std::max<std::size_t>(1, std::min(cfg.threads, n));
    std::vector<std::uint64_t> seeds(workers);
    for (auto& s : seeds) s = rng();
    detail::parallel_for(n, workers, [&](std::size_t t, std::size_t begin, std::size_t end) {
        if (workers == 1) {
            detail::Word2VecWorker<false>(state, cfg, seeds[t]).run(corpus, segment_end, begin, end);
        } else {
            detail::Word2VecWorker<true>(state, cfg, seeds[t]).run(corpus, segment_end, begin, end);
        }
    });

    EmbeddingMatrix emb(vocab.words(), dim, Method::word2vec);
    for (std::size_t r = 0; r < rows; ++r) {
        auto out = emb.row(r);
        for (std::size_t b = 0; b < dim; ++b) out[b] = static_cast<double>(state.input[r * dim + b]);
    }
    return emb;
}

}  // namespace wordrhyme
