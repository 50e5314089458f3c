// wordrhyme: command-line driver for the corpus → embedding → clustering →
// rhyme-score pipeline. Each subcommand reads and writes the same files that
// `run` produces, so stages can be rerun in isolation.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "wordrhyme/wordrhyme.hpp"

namespace fs = std::filesystem;
using namespace wordrhyme;

namespace {

enum ExitCode { kOk = 0, kUsage = 2, kData = 3, kInternal = 4 };

int exit_code_for(std::exception_ptr error) {
    try {
        std::rethrow_exception(error);
    } catch (const StageFailure& e) {
        return exit_code_for(e.cause());
    } catch (const ConfigError&) {
        return kUsage;
    } catch (const InvalidArgumentError&) {
        return kUsage;
    } catch (const DataError&) {
        return kData;
    } catch (const fs::filesystem_error&) {
        return kData;
    } catch (...) {
        return kInternal;
    }
}

struct StatsArgs {
    std::vector<std::string> corpus;
    std::string name;
    std::uint64_t min_count = 1;
    bool sentence_breaks = false;
    bool header = false;
};

struct TrainArgs {
    std::vector<std::string> corpus;
    std::string method = "word2vec";
    TrainConfig cfg;
    std::string mode = "cbow";
    bool sentence_breaks = false;
    std::string out;
    std::string cooc_out, cooc_in, loss_out;
};

struct ClusterArgs {
    std::size_t k = 1000;
    std::size_t max_iters = 100;
    std::uint64_t seed = 1;
    std::size_t threads = 1;
    std::string in, out, random_baseline_of, objective_out;
};

struct EvaluateArgs {
    std::string clusters, out, metric = "basic", lexicon;
    std::size_t threads = 1;
};

struct ReportArgs {
    std::vector<std::string> runs;
    std::string out = ".";
    std::string config;
};

LoadedCorpus load(const std::vector<std::string>& files, std::uint64_t min_count, bool breaks) {
    const std::vector<fs::path> paths(files.begin(), files.end());
    return load_corpus(paths, min_count, breaks);
}

int run_stats(const StatsArgs& a) {
    const auto data = load(a.corpus, a.min_count, a.sentence_breaks);
    const std::string name = a.name.empty() ? fs::path(a.corpus.front()).stem().string() : a.name;
    if (a.header) std::cout << "name,total_tokens,unique_words,avg_word_length\n";
    std::cout << stats_csv_row(name, corpus_stats(data.corpus, data.vocab)) << '\n';
    return kOk;
}

int run_train(TrainArgs a) {
    a.cfg.mode = parse_word2vec_mode(a.mode);
    a.cfg.validate();
    const Method method = parse_method(a.method);
    const auto data = load(a.corpus, a.cfg.min_count, a.sentence_breaks);
    EmbeddingMatrix vectors;
    if (method == Method::word2vec) {
        vectors = train_word2vec(data.corpus, data.vocab, a.cfg);
    } else {
        const CooccurrenceTable cooc = a.cooc_in.empty()
                                           ? build_cooccurrence(data.corpus, data.vocab.size(), a.cfg.window, a.cfg.threads)
                                           : read_cooccurrence(a.cooc_in, data.vocab.size());
        if (!a.cooc_out.empty()) write_cooccurrence(a.cooc_out, cooc);
        auto model = train_glove(cooc, data.vocab.words(), a.cfg);
        if (!a.loss_out.empty()) write_series(a.loss_out, "loss", model.loss_history);
        for (std::size_t i = 0; i < model.loss_history.size(); ++i) {
            std::clog << "iteration " << i + 1 << " loss " << model.loss_history[i] << '\n';
        }
        vectors = std::move(model.vectors);
    }
    if (!vectors.all_finite()) throw InvariantError("training produced non-finite vector components");
    write_embeddings(a.out, vectors);
    return kOk;
}

int run_cluster(const ClusterArgs& a) {
    if (!a.random_baseline_of.empty()) {
        const Clustering source = read_clustering(a.random_baseline_of);
        const auto profile = source.size_profile();
        write_clustering(a.out, random_clustering(source.words(), profile, a.seed));
        return kOk;
    }
    if (a.in.empty()) throw UsageError("cluster needs --in EMBEDDING_FILE or --random-baseline-of CLUSTER_FILE");
    const EmbeddingMatrix emb = read_embeddings(a.in);
    const KMeansResult km = kmeans_cosine(emb, a.k, a.max_iters, a.seed, a.threads);
    std::clog << "k-means: " << km.iterations << " iterations, " << (km.converged ? "converged" : "stopped at max-iters")
              << '\n';
    write_clustering(a.out, km.clustering);
    if (!a.objective_out.empty()) write_series(a.objective_out, "objective", km.objective_history);
    return kOk;
}

int run_evaluate(const EvaluateArgs& a) {
    const MetricKind metric = parse_metric(a.metric);
    std::optional<IpaLexicon> lexicon;
    if (metric == MetricKind::ipa) {
        if (a.lexicon.empty()) throw UsageError("--metric ipa requires --lexicon");
        lexicon = IpaLexicon::load(a.lexicon);
        for (const auto& w : lexicon->warnings()) std::clog << "warning: " << w << '\n';
    }
    const Clustering clustering = read_clustering(a.clusters);
    const auto summary = evaluate_clustering(clustering, metric, lexicon ? &*lexicon : nullptr, a.threads);
    const auto run = make_run("", "", summary, clustering.words());
    write_scores(a.out, run);
    std::clog << "mean RS " << format_percent(100.0 * summary.corpus_mean) << "% over "
              << summary.per_cluster.size() - summary.excluded_clusters << " clusters (" << summary.excluded_clusters
              << " excluded)";
    if (metric == MetricKind::ipa) std::clog << ", IPA fallback rate " << summary.fallback_rate();
    std::clog << '\n';
    return kOk;
}

int run_report(const ReportArgs& a) {
    std::vector<EvaluatedRun> runs;
    for (const auto& spec : a.runs) {
        const auto first = spec.find(':');
        const auto second = first == std::string::npos ? std::string::npos : spec.find(':', first + 1);
        if (second == std::string::npos) {
            throw UsageError("--run expects CORPUS:METHOD:SCORES_CSV, got '" + spec + "'");
        }
        runs.push_back(read_scores(spec.substr(second + 1), spec.substr(0, first), spec.substr(first + 1, second - first - 1)));
    }
    std::vector<std::pair<std::string, std::string>> config;
    if (!a.config.empty()) {
        std::ifstream is(a.config);
        if (!is) throw DataError("cannot open '" + a.config + "'");
        config = read_config_file(is);
    }
    const auto report = build_report(runs, std::move(config));
    write_report(a.out, report);
    write_summary_csv(std::cout, report);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Word-embedding clusters versus rhythmic similarity"};
    app.require_subcommand(1);

    StatsArgs stats;
    auto* stats_cmd = app.add_subcommand("stats", "Print corpus statistics as one CSV row");
    stats_cmd->add_option("--corpus", stats.corpus, "Corpus text file(s)")->required()->check(CLI::ExistingFile);
    stats_cmd->add_option("--name", stats.name, "Corpus label (default: file stem)");
    stats_cmd->add_option("--min-count", stats.min_count)->check(CLI::PositiveNumber);
    stats_cmd->add_flag("--sentence-breaks", stats.sentence_breaks);
    stats_cmd->add_flag("--header", stats.header, "Print the CSV header first");

    TrainArgs train;
    auto* train_cmd = app.add_subcommand("train", "Train word2vec or GloVe vectors");
    train_cmd->add_option("--corpus", train.corpus, "Corpus text file(s)")->required()->check(CLI::ExistingFile);
    train_cmd->add_option("--method", train.method, "word2vec|glove")->check(CLI::IsMember({"word2vec", "glove"}));
    train_cmd->add_option("--dim", train.cfg.dim)->check(CLI::PositiveNumber);
    train_cmd->add_option("--window", train.cfg.window)->check(CLI::PositiveNumber);
    train_cmd->add_option("--min-count", train.cfg.min_count)->check(CLI::PositiveNumber);
    train_cmd->add_option("--seed", train.cfg.seed);
    train_cmd->add_option("--threads", train.cfg.threads)->check(CLI::PositiveNumber);
    train_cmd->add_option("--mode", train.mode, "word2vec mode: cbow|skipgram");
    train_cmd->add_option("--negative", train.cfg.negative)->check(CLI::PositiveNumber);
    train_cmd->add_option("--epochs", train.cfg.epochs)->check(CLI::PositiveNumber);
    train_cmd->add_option("--sample", train.cfg.sample);
    train_cmd->add_option("--alpha", train.cfg.w2v_alpha, "word2vec initial learning rate");
    train_cmd->add_option("--iterations", train.cfg.glove_iterations, "GloVe iterations")->check(CLI::PositiveNumber);
    train_cmd->add_option("--x-max", train.cfg.x_max);
    train_cmd->add_option("--eta", train.cfg.glove_eta, "GloVe AdaGrad learning rate");
    train_cmd->add_flag("--sentence-breaks", train.sentence_breaks);
    train_cmd->add_option("--cooc-out", train.cooc_out, "Save the GloVe co-occurrence table");
    train_cmd->add_option("--cooc-in", train.cooc_in, "Reuse a saved co-occurrence table")->check(CLI::ExistingFile);
    train_cmd->add_option("--loss-out", train.loss_out, "Write the GloVe loss per iteration");
    train_cmd->add_option("--out", train.out, "Embedding text file")->required();

    ClusterArgs cluster;
    auto* cluster_cmd = app.add_subcommand("cluster", "Spherical k-means, or a size-matched random partition");
    cluster_cmd->add_option("--k", cluster.k)->check(CLI::PositiveNumber);
    cluster_cmd->add_option("--max-iters", cluster.max_iters)->check(CLI::PositiveNumber);
    cluster_cmd->add_option("--seed", cluster.seed);
    cluster_cmd->add_option("--threads", cluster.threads)->check(CLI::PositiveNumber);
    cluster_cmd->add_option("--in", cluster.in, "Embedding text file")->check(CLI::ExistingFile);
    cluster_cmd->add_option("--random-baseline-of", cluster.random_baseline_of,
                            "Cluster CSV whose sizes the random partition reproduces")
        ->check(CLI::ExistingFile);
    cluster_cmd->add_option("--objective-out", cluster.objective_out);
    cluster_cmd->add_option("--out", cluster.out, "Cluster CSV (word,cluster_index)")->required();

    EvaluateArgs evaluate;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "Score each cluster's mean rhythmic similarity");
    evaluate_cmd->add_option("--clusters", evaluate.clusters)->required()->check(CLI::ExistingFile);
    evaluate_cmd->add_option("--metric", evaluate.metric, "basic|ipa")->check(CLI::IsMember({"basic", "ipa"}));
    evaluate_cmd->add_option("--lexicon", evaluate.lexicon, "IPA lexicon TSV")->check(CLI::ExistingFile);
    evaluate_cmd->add_option("--threads", evaluate.threads)->check(CLI::PositiveNumber);
    evaluate_cmd->add_option("--out", evaluate.out, "Per-cluster score CSV")->required();

    ReportArgs report;
    auto* report_cmd = app.add_subcommand("report", "Aggregate per-cluster score files");
    report_cmd->add_option("--run", report.runs, "CORPUS:METHOD:SCORES_CSV (repeatable)")->required();
    report_cmd->add_option("--out", report.out, "Output directory");
    report_cmd->add_option("--config", report.config, "key = value file echoed into report.txt");

    std::string config_file;
    std::vector<std::pair<std::string, std::string>> flags;
    std::vector<std::string> set_values;
    auto* run_cmd = app.add_subcommand("run", "Run the full pipeline");
    run_cmd->add_option("--config", config_file, "key = value configuration file")->check(CLI::ExistingFile);
    run_cmd->add_option("--set", set_values, "Override any configuration key: KEY=VALUE");
    std::vector<std::string> run_values(config_keys().size());
    for (std::size_t i = 0; i < config_keys().size(); ++i) {
        std::string flag = config_keys()[i];
        std::replace(flag.begin(), flag.end(), '_', '-');
        run_cmd->add_option("--" + flag, run_values[i])->allow_extra_args(false);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*stats_cmd) return run_stats(stats);
        if (*train_cmd) return run_train(train);
        if (*cluster_cmd) return run_cluster(cluster);
        if (*evaluate_cmd) return run_evaluate(evaluate);
        if (*report_cmd) return run_report(report);
        if (*run_cmd) {
            for (std::size_t i = 0; i < config_keys().size(); ++i) {
                std::string flag = config_keys()[i];
                std::replace(flag.begin(), flag.end(), '_', '-');
                if (run_cmd->count("--" + flag) > 0) flags.emplace_back(config_keys()[i], run_values[i]);
            }
            for (const auto& kv : set_values) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos) throw UsageError("--set expects KEY=VALUE, got '" + kv + "'");
                flags.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
            }
            const PipelineConfig cfg =
                parse_config(flags, config_file.empty() ? std::nullopt : std::optional<fs::path>(config_file));
            const auto result = run_pipeline(cfg, &std::clog);
            write_summary_csv(std::cout, result);
            return kOk;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        if (dynamic_cast<const UsageError*>(&e)) {
            std::cerr << "valid configuration keys:";
            for (const auto& k : config_keys()) std::cerr << ' ' << k;
            std::cerr << '\n';
        }
        return exit_code_for(std::current_exception());
    }
    return kInternal;
}
