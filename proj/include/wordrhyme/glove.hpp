#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "wordrhyme/cooccurrence.hpp"
#include "wordrhyme/embedding.hpp"
#include "wordrhyme/error.hpp"
#include "wordrhyme/parallel.hpp"

namespace wordrhyme {

struct GloveModel {
    /// Word vector + context vector for every vocabulary word.
    EmbeddingMatrix vectors;
    /// Mean of 0.5 * f(X_ij) * residual^2 over all entries, one value per
    /// iteration, measured while that iteration's updates are applied.
    std::vector<double> loss_history;
};

namespace detail {

// Gradient clipping bound used by the reference GloVe trainer.
inline constexpr double kGloveGradClip = 100.0;

struct GloveParams {
    std::size_t dim;
    std::vector<double> word, context;          // rows x dim
    std::vector<double> word_bias, context_bias;
    std::vector<double> word_gradsq, context_gradsq;
    std::vector<double> word_bias_gradsq, context_bias_gradsq;
};

template <bool Shared>
double glove_pass(GloveParams& p, std::span<const Cooccurrence> records, const TrainConfig& cfg,
                  std::vector<double>& w_update, std::vector<double>& c_update) {
    using A = ParamAccess<Shared>;
    const std::size_t dim = p.dim;
    double cost = 0.0;
    for (const auto& rec : records) {
        double* w = p.word.data() + static_cast<std::size_t>(rec.word) * dim;
        double* c = p.context.data() + static_cast<std::size_t>(rec.context) * dim;
        double* wg = p.word_gradsq.data() + static_cast<std::size_t>(rec.word) * dim;
        double* cg = p.context_gradsq.data() + static_cast<std::size_t>(rec.context) * dim;

        double diff = 0.0;
        for (std::size_t b = 0; b < dim; ++b) diff += A::load(w[b]) * A::load(c[b]);
        diff += A::load(p.word_bias[rec.word]) + A::load(p.context_bias[rec.context]) - std::log(rec.value);
        const double weight = rec.value < cfg.x_max ? std::pow(rec.value / cfg.x_max, cfg.glove_alpha) : 1.0;
        double fdiff = weight * diff;
        if (!std::isfinite(diff) || !std::isfinite(fdiff)) continue;
        cost += 0.5 * fdiff * diff;

        fdiff *= cfg.glove_eta;
        double w_sum = 0.0, c_sum = 0.0;
        for (std::size_t b = 0; b < dim; ++b) {
            const double g1 = std::clamp(fdiff * A::load(c[b]), -kGloveGradClip, kGloveGradClip);
            const double g2 = std::clamp(fdiff * A::load(w[b]), -kGloveGradClip, kGloveGradClip);
            w_update[b] = g1 / std::sqrt(A::load(wg[b]));
            c_update[b] = g2 / std::sqrt(A::load(cg[b]));
            w_sum += w_update[b];
            c_sum += c_update[b];
            A::add(wg[b], g1 * g1);
            A::add(cg[b], g2 * g2);
        }
        if (std::isfinite(w_sum) && std::isfinite(c_sum)) {
            for (std::size_t b = 0; b < dim; ++b) {
                A::add(w[b], -w_update[b]);
                A::add(c[b], -c_update[b]);
            }
        }
        const double wb = fdiff / std::sqrt(A::load(p.word_bias_gradsq[rec.word]));
        const double cb = fdiff / std::sqrt(A::load(p.context_bias_gradsq[rec.context]));
        if (std::isfinite(wb)) A::add(p.word_bias[rec.word], -wb);
        if (std::isfinite(cb)) A::add(p.context_bias[rec.context], -cb);
        A::add(p.word_bias_gradsq[rec.word], fdiff * fdiff);
        A::add(p.context_bias_gradsq[rec.context], fdiff * fdiff);
    }
    return cost;
}

}  // namespace detail

/// Fits GloVe vectors to a co-occurrence table with AdaGrad. Records are
/// shuffled once with cfg.seed; with cfg.threads > 1 workers own contiguous
/// slices of the shuffled records and update shared rows lock-free.
inline GloveModel train_glove(const CooccurrenceTable& cooc, std::span<const std::string> words,
                              const TrainConfig& cfg) {
    cfg.validate();
    if (cooc.empty()) throw ConfigError("cannot train GloVe on an empty co-occurrence table");
    if (words.size() != cooc.vocab_size()) {
        throw ConfigError("word list does not match the co-occurrence vocabulary");
    }
    const std::size_t rows = words.size();
    const std::size_t dim = cfg.dim;

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> init(-0.5 / static_cast<double>(dim), 0.5 / static_cast<double>(dim));
    detail::GloveParams p{dim, std::vector<double>(rows * dim), std::vector<double>(rows * dim),
                          std::vector<double>(rows, 0.0), std::vector<double>(rows, 0.0),
                          std::vector<double>(rows * dim, 1.0), std::vector<double>(rows * dim, 1.0),
                          std::vector<double>(rows, 1.0), std::vector<double>(rows, 1.0)};
    for (auto& x : p.word) x = init(rng);
    for (auto& x : p.context) x = init(rng);

    std::vector<Cooccurrence> records = cooc.entries();
    std::shuffle(records.begin(), records.end(), rng);

    GloveModel model;
    model.loss_history.reserve(cfg.glove_iterations);
    const std::size_t workers = std::max<std::size_t>(1, std::min(cfg.threads, records.size()));
    std::vector<double> costs(workers);
    std::vector<std::vector<double>> w_buf(workers, std::vector<double>(dim));
    std::vector<std::vector<double>> c_buf(workers, std::vector<double>(dim));
    for (std::size_t it = 0; it < cfg.glove_iterations; ++it) {
        detail::parallel_for(records.size(), workers, [&](std::size_t t, std::size_t begin, std::size_t end) {
            const std::span<const Cooccurrence> slice(records.data() + begin, end - begin);
            costs[t] = workers == 1 ? detail::glove_pass<false>(p, slice, cfg, w_buf[t], c_buf[t])
                                    : detail::glove_pass<true>(p, slice, cfg, w_buf[t], c_buf[t]);
        });
        double total = 0.0;
        for (double c : costs) total += c;
        model.loss_history.push_back(total / static_cast<double>(records.size()));
    }

    model.vectors = EmbeddingMatrix(std::vector<std::string>(words.begin(), words.end()), dim, Method::glove);
    for (std::size_t r = 0; r < rows; ++r) {
        auto out = model.vectors.row(r);
        for (std::size_t b = 0; b < dim; ++b) out[b] = p.word[r * dim + b] + p.context[r * dim + b];
    }
    return model;
}

}  // namespace wordrhyme
