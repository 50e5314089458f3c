#pragma once

#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "wordrhyme/clustering.hpp"
#include "wordrhyme/config.hpp"
#include "wordrhyme/cooccurrence.hpp"
#include "wordrhyme/corpus.hpp"
#include "wordrhyme/embedding.hpp"
#include "wordrhyme/error.hpp"
#include "wordrhyme/glove.hpp"
#include "wordrhyme/report.hpp"
#include "wordrhyme/rhythm.hpp"
#include "wordrhyme/word2vec.hpp"

namespace wordrhyme {

/// A pipeline stage failed; `cause` holds the original exception.
class StageFailure : public Error {
public:
    StageFailure(std::string stage, const std::string& message, std::exception_ptr cause)
        : Error("stage '" + stage + "' failed: " + message), stage_(std::move(stage)), cause_(std::move(cause)) {}

    const std::string& stage() const noexcept { return stage_; }
    std::exception_ptr cause() const noexcept { return cause_; }

private:
    std::string stage_;
    std::exception_ptr cause_;
};

/// Tokenized corpus with its vocabulary.
struct LoadedCorpus {
    Vocabulary vocab;
    TokenCorpus corpus;
};

inline LoadedCorpus load_corpus(std::span<const std::filesystem::path> paths, std::uint64_t min_count,
                                bool sentence_breaks) {
    TokenizerConfig rules;
    rules.sentence_breaks = sentence_breaks;
    const TokenStream stream = load_token_stream(paths, rules);
    LoadedCorpus loaded;
    loaded.vocab = build_vocabulary(stream.tokens, min_count);
    loaded.corpus = make_corpus(stream, loaded.vocab);
    return loaded;
}

struct TrainedEmbedding {
    EmbeddingMatrix vectors;
    /// GloVe only.
    std::vector<double> loss_history;
};

inline TrainedEmbedding train_embedding(const LoadedCorpus& data, Method method, const TrainConfig& cfg) {
    if (method == Method::word2vec) return {train_word2vec(data.corpus, data.vocab, cfg), {}};
    const auto cooc = build_cooccurrence(data.corpus, data.vocab.size(), cfg.window, cfg.threads);
    if (cooc.empty()) throw ConfigError("corpus too small to produce any co-occurrence");
    auto model = train_glove(cooc, data.vocab.words(), cfg);
    return {std::move(model.vectors), std::move(model.loss_history)};
}

inline void write_series(const std::filesystem::path& path, std::string_view header, std::span<const double> values) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot write '" + path.string() + "'");
    os << "iteration," << header << '\n';
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::string v;
        detail::append_double(v, values[i]);
        os << i + 1 << ',' << v << '\n';
    }
}

inline void write_config_file(const std::filesystem::path& path,
                              std::span<const std::pair<std::string, std::string>> settings) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot write '" + path.string() + "'");
    for (const auto& [k, v] : settings) os << k << " = " << v << '\n';
}

/// Corpus → vocabulary → embeddings → k-means → random baseline → scores →
/// report. Every intermediate file is written under cfg.out (one
/// subdirectory per corpus); a failure leaves a FAILED file naming the stage.
inline ComparisonReport run_pipeline(const PipelineConfig& cfg, std::ostream* log = nullptr) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out);
    const fs::path failed_marker = cfg.out / "FAILED";
    fs::remove(failed_marker);

    std::string stage = "config";
    auto note = [&](const std::string& msg) {
        if (log) *log << "[" << stage << "] " << msg << std::endl;
    };
    try {
        if (cfg.corpus.empty()) throw UsageError("no corpus given");
        if (std::find(cfg.methods.begin(), cfg.methods.end(), cfg.baseline_of) == cfg.methods.end()) {
            throw UsageError("baseline_of names a method that is not being trained");
        }
        // The output location does not influence any result, so it is left
        // out of the echo and two runs into different directories match.
        auto settings = echo_config(cfg);
        std::erase_if(settings, [](const auto& kv) { return kv.first == "out"; });
        write_config_file(cfg.out / "config.txt", settings);

        std::optional<IpaLexicon> lexicon;
        if (cfg.metric == MetricKind::ipa) {
            stage = "lexicon";
            lexicon = IpaLexicon::load(*cfg.lexicon);
            for (const auto& w : lexicon->warnings()) note(w);
        }

        std::vector<EvaluatedRun> runs;
        for (std::size_t ci = 0; ci < cfg.corpus.size(); ++ci) {
            const std::string name = cfg.corpus_name(ci);
            const fs::path dir = cfg.out / name;
            fs::create_directories(dir);

            stage = "stats";
            const std::vector<fs::path> files{cfg.corpus[ci]};
            const LoadedCorpus data = load_corpus(files, cfg.train.min_count, cfg.sentence_breaks);
            const CorpusStats stats = corpus_stats(data.corpus, data.vocab);
            {
                std::ofstream os(dir / "stats.csv", std::ios::binary);
                os << "name,total_tokens,unique_words,avg_word_length\n" << stats_csv_row(name, stats) << '\n';
            }
            note(stats_csv_row(name, stats));

            std::optional<Clustering> baseline_source;
            for (Method method : cfg.methods) {
                const std::string m(to_string(method));
                stage = "train";
                TrainConfig tc = cfg.train;
                tc.seed = *cfg.embedding_seed;
                note(m + " on " + name);
                const TrainedEmbedding emb = train_embedding(data, method, tc);
                if (!emb.vectors.all_finite()) throw InvariantError(m + " produced non-finite vector components");
                write_embeddings(dir / ("vectors_" + m + ".txt"), emb.vectors);
                if (!emb.loss_history.empty()) write_series(dir / "glove_loss.csv", "loss", emb.loss_history);

                stage = "cluster";
                note("k-means k=" + std::to_string(cfg.k) + " over " + m + " vectors");
                KMeansResult km = kmeans_cosine(emb.vectors, cfg.k, cfg.max_iters, *cfg.clustering_seed, tc.threads);
                write_clustering(dir / ("clusters_" + m + ".csv"), km.clustering);
                write_series(dir / ("objective_" + m + ".csv"), "objective", km.objective_history);

                stage = "evaluate";
                const auto summary = evaluate_clustering(km.clustering, cfg.metric, lexicon ? &*lexicon : nullptr, tc.threads);
                runs.push_back(make_run(name, m, summary, km.clustering.words()));
                write_scores(dir / ("scores_" + m + ".csv"), runs.back());
                if (method == cfg.baseline_of) baseline_source = std::move(km.clustering);
            }

            stage = "baseline";
            const auto profile = baseline_source->size_profile();
            const Clustering random = random_clustering(baseline_source->words(), profile, *cfg.baseline_seed);
            write_clustering(dir / "clusters_random.csv", random);

            stage = "evaluate";
            const auto summary = evaluate_clustering(random, cfg.metric, lexicon ? &*lexicon : nullptr, cfg.train.threads);
            runs.push_back(make_run(name, "random", summary, random.words()));
            write_scores(dir / "scores_random.csv", runs.back());
        }

        stage = "report";
        ComparisonReport report = build_report(runs, std::move(settings));
        write_report(cfg.out, report);
        note("wrote " + (cfg.out / "summary.csv").string());
        return report;
    } catch (const std::exception& e) {
        std::ofstream marker(failed_marker, std::ios::binary);
        marker << "stage = " << stage << '\n' << "error = " << e.what() << '\n';
        throw StageFailure(stage, e.what(), std::current_exception());
    }
}

}  // namespace wordrhyme
