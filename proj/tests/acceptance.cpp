// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// gating criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <sys/wait.h>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "wordrhyme/wordrhyme.hpp"

using namespace wordrhyme;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

const fs::path kData = WORDRHYME_DATA_DIR;
constexpr std::uint64_t kSeeds[] = {1, 2, 3};

std::size_t worker_threads() {
    return std::max(1u, std::thread::hardware_concurrency());
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
    bool pass = true;
    std::string detail;
};

int failures = 0;

void report(const std::string& id, const Outcome& o, bool gating = true) {
    const char* verdict = !gating ? "INFO" : o.pass ? "PASS" : "FAIL";
    std::printf("%s criterion %s: %s\n", verdict, id.c_str(), o.detail.c_str());
    std::fflush(stdout);
    if (gating && !o.pass) ++failures;
}

void check(Outcome& o, bool ok, const std::string& what) {
    if (!ok) {
        o.pass = false;
        o.detail += "[failed: " + what + "] ";
    }
}

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

double mean_percent(const Clustering& c, std::size_t threads) {
    return 100.0 * evaluate_clustering(c, MetricKind::basic, nullptr, threads).corpus_mean;
}

// Every trained matrix seen during the run, for the finiteness check.
std::size_t matrices_checked = 0;
std::size_t matrices_non_finite = 0;
std::vector<std::vector<double>> glove_losses;

void record(const TrainedEmbedding& emb) {
    ++matrices_checked;
    if (!emb.vectors.all_finite()) ++matrices_non_finite;
    if (!emb.loss_history.empty()) glove_losses.push_back(emb.loss_history);
}

std::vector<fs::path> shakespeare(const std::vector<std::string>& stems) {
    std::vector<fs::path> out;
    for (const auto& s : stems) out.push_back(kData / "shakespeare" / (s + "_gut.txt"));
    return out;
}

std::vector<fs::path> whole_shakespeare() {
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(kData / "shakespeare")) {
        if (e.path().filename().string().ends_with("_gut.txt")) out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

Outcome criterion_rs_examples() {
    Outcome o;
    auto exact = [&](const char* a, const char* b, std::size_t num, std::size_t den) {
        const auto s = rs_basic(a, b);
        check(o, s.matches == num && s.length == den,
              std::string(a) + "/" + b + " gave " + std::to_string(s.matches) + "/" + std::to_string(s.length));
    };
    exact("hustle", "bustle", 5, 6);
    exact("holy", "technology", 2, 10);
    exact("rotation", "positions", 0, 9);
    exact("refine", "devise", 3, 6);
    exact("cheese", "peas", 1, 6);
    IpaLexicon lex;
    lex.insert("cheese", "tʃiːz");
    lex.insert("peas", "piːz");
    const auto ipa = rs_ipa("cheese", "peas", lex);
    check(o, ipa.matches == 3 && ipa.length == 5, "rs_ipa cheese/peas");
    o.detail += "5/6, 2/10, 0/9, 3/6, 1/6 and IPA 3/5 reproduced exactly";
    return o;
}

Outcome criterion_aggregates() {
    Outcome o;
    std::mt19937_64 rng(20240601);
    std::vector<std::string> words;
    std::vector<std::uint32_t> assign;
    std::vector<std::vector<std::u32string>> clusters(100);
    for (std::uint32_t c = 0; c < 100; ++c) {
        const std::size_t n = 1 + rng() % 30;
        for (std::size_t i = 0; i < n; ++i) {
            // A base-26 prefix keeps words unique; endings collide often.
            std::u32string w;
            for (std::size_t id = words.size();; id /= 26) {
                w.push_back(U'a' + static_cast<char32_t>(id % 26));
                if (id < 26) break;
            }
            w += oracle::random_word(rng, 8, 5);
            clusters[c].push_back(w);
            words.push_back(unicode::encode_utf8(w));
            assign.push_back(c);
        }
    }
    const Clustering clustering(words, 100, assign, Provenance::random);
    const auto summary = evaluate_clustering(clustering);
    double worst = 0.0;
    std::vector<double> included;
    for (std::size_t c = 0; c < 100; ++c) {
        const auto& s = summary.per_cluster[c];
        if (clusters[c].size() < 2) {
            check(o, s.excluded, "singleton cluster not excluded");
            continue;
        }
        const double want = oracle::cluster_mean(clusters[c]);
        worst = std::max(worst, std::abs(s.mean_rs - want));
        included.push_back(want);
    }
    const double eq2_err = std::abs(summary.corpus_mean - oracle::compensated_mean(included));
    check(o, worst <= 1e-12, "per-cluster error " + fmt("%.3g", worst));
    check(o, eq2_err <= 1e-12, "corpus-mean error " + fmt("%.3g", eq2_err));
    o.detail += "100 clusters, max per-cluster error " + fmt("%.2g", worst) + ", corpus-mean error " +
                fmt("%.2g", eq2_err);
    return o;
}

Outcome criterion_random_baseline() {
    Outcome o;
    const auto start = Clock::now();
    const auto files = whole_shakespeare();
    TrainConfig cfg;
    cfg.threads = worker_threads();
    const LoadedCorpus data = load_corpus(files, cfg.min_count, false);
    check(o, data.vocab.size() >= 15000, "only " + std::to_string(data.vocab.size()) + " unique words");
    double sum = 0.0;
    std::string per_seed;
    for (std::uint64_t seed : kSeeds) {
        cfg.seed = seed;
        const auto emb = train_embedding(data, Method::word2vec, cfg);
        record(emb);
        const auto km = kmeans_cosine(emb.vectors, 1000, 100, seed, cfg.threads);
        const auto random = random_clustering(data.vocab, km.clustering.size_profile(), seed);
        const double m = mean_percent(random, cfg.threads);
        per_seed += fmt(" %.2f", m);
        sum += m;
    }
    const double mean = sum / 3.0;
    const double elapsed = seconds_since(start);
    check(o, mean >= 4.0 && mean <= 8.0, "mean outside [4, 8]");
    check(o, elapsed < 300.0, "took longer than 5 minutes");
    o.detail += std::to_string(files.size()) + " files, " + std::to_string(data.corpus.size()) + " tokens, " +
                std::to_string(data.vocab.size()) + " words; random mean RS " + fmt("%.2f%%", mean) +
                " (seeds:" + per_seed + ") in " + fmt("%.0f s", elapsed);
    return o;
}

struct HypothesisResult {
    double embedding[2] = {0, 0};
    double random[2] = {0, 0};
};

Outcome criterion_hypothesis(HypothesisResult& r) {
    Outcome o;
    const auto start = Clock::now();
    const auto files = shakespeare({"sonnets", "rape_of_lucrece", "lovers_complaint", "passionate_pilgrim",
                                    "phoenix_and_the_turtle", "richard_ii", "midsummer_nights_dream",
                                    "romeo_and_juliet", "tempest", "macbeth", "john"});
    TrainConfig cfg;
    cfg.threads = worker_threads();
    const LoadedCorpus data = load_corpus(files, cfg.min_count, false);
    const Method methods[] = {Method::word2vec, Method::glove};
    for (std::uint64_t seed : kSeeds) {
        cfg.seed = seed;
        for (int m = 0; m < 2; ++m) {
            const auto emb = train_embedding(data, methods[m], cfg);
            record(emb);
            const auto km = kmeans_cosine(emb.vectors, 1000, 100, seed, cfg.threads);
            r.embedding[m] += mean_percent(km.clustering, cfg.threads) / 3.0;
            const auto random = random_clustering(data.vocab, km.clustering.size_profile(), seed);
            r.random[m] += mean_percent(random, cfg.threads) / 3.0;
        }
    }
    const double elapsed = seconds_since(start);
    o.detail += std::to_string(data.corpus.size()) + " tokens, " + std::to_string(data.vocab.size()) + " words; ";
    for (int m = 0; m < 2; ++m) {
        const double margin = r.embedding[m] - r.random[m];
        const std::string name(to_string(methods[m]));
        check(o, margin >= 0.3, name + " margin " + fmt("%.3f", margin) + " < 0.3");
        o.detail += name + " " + fmt("%.2f", r.embedding[m]) + " vs random " + fmt("%.2f", r.random[m]) +
                    " (margin " + fmt("%+.2f", margin) + "); ";
    }
    check(o, elapsed < 1800.0, "took longer than 30 minutes");
    o.detail += "in " + fmt("%.0f s", elapsed);
    return o;
}

Outcome criterion_properties() {
    Outcome o;
    const auto start = Clock::now();
    std::mt19937_64 rng(99);

    std::size_t rs_bad = 0;
    for (int i = 0; i < 100000; ++i) {
        const auto a = oracle::random_word(rng, 12, 4);
        const auto b = oracle::random_word(rng, 12, 4);
        const auto ab = rs_basic(a, b);
        const auto ba = rs_basic(b, a);
        const bool ok = ab.matches == ba.matches && ab.length == ba.length &&
                        ab.length == std::max(a.size(), b.size()) && ab.value() >= 0.0 && ab.value() <= 1.0 &&
                        (a != b || ab.value() == 1.0);
        if (!ok) ++rs_bad;
    }
    check(o, rs_bad == 0, std::to_string(rs_bad) + " RS law violations");

    std::size_t km_bad = 0;
    std::normal_distribution<double> g;
    for (int instance = 0; instance < 50; ++instance) {
        const std::size_t n = 20 + rng() % 200;
        const std::size_t dim = 2 + rng() % 12;
        const std::size_t k = 1 + rng() % std::min<std::size_t>(n, 25);
        std::vector<std::string> words;
        for (std::size_t i = 0; i < n; ++i) words.push_back("w" + std::to_string(i));
        EmbeddingMatrix emb(words, dim, Method::word2vec);
        for (std::size_t i = 0; i < n; ++i) {
            for (auto& x : emb.row(i)) x = g(rng);
        }
        const auto r = kmeans_cosine(emb, k, 100, instance);
        const auto& h = r.objective_history;
        for (std::size_t i = 1; i < h.size(); ++i) {
            if (h[i] < h[i - 1] - 1e-9 * std::abs(h[i - 1])) ++km_bad;
        }
        std::size_t total = 0;
        for (std::size_t c = 0; c < k; ++c) {
            if (r.clustering.members(c).empty()) ++km_bad;
            total += r.clustering.members(c).size();
        }
        if (total != n) ++km_bad;
    }
    check(o, km_bad == 0, std::to_string(km_bad) + " k-means violations");

    std::size_t hist_bad = 0;
    std::uniform_real_distribution<double> u(0.0, 100.0);
    for (int t = 0; t < 200; ++t) {
        std::vector<double> v(rng() % 3000);
        for (auto& x : v) x = u(rng);
        const auto h = build_histogram(v);
        std::uint64_t sum = 0;
        for (auto b : h.bins) sum += b;
        if (sum != v.size() || h.total != v.size()) ++hist_bad;
    }
    check(o, hist_bad == 0, "histogram lost counts");

    std::size_t cooc_bad = 0;
    for (int t = 0; t < 30; ++t) {
        std::vector<std::string> tokens(300);
        for (auto& s : tokens) s = "t" + std::to_string(rng() % 15);
        const auto vocab = build_vocabulary(tokens);
        std::vector<std::size_t> breaks;
        for (std::size_t p = 5; p < tokens.size(); p += 3 + rng() % 30) breaks.push_back(p);
        const auto corpus = make_corpus({tokens, breaks}, vocab);
        const std::size_t window = 1 + t % 8;
        const auto table = build_cooccurrence(corpus, vocab.size(), window);
        const auto want = oracle::cooccurrence(corpus.tokens, corpus.sentence_breaks, window);
        if (table.size() != want.size()) ++cooc_bad;
        for (const auto& e : table.entries()) {
            if (e.value != table.at(e.context, e.word)) ++cooc_bad;
            if (std::abs(e.value - want.at({e.word, e.context})) > 1e-9) ++cooc_bad;
        }
    }
    check(o, cooc_bad == 0, "co-occurrence asymmetry or mismatch");

    // A fresh GloVe fit on a random corpus plus every fit from the corpus runs.
    {
        std::vector<std::string> tokens(20000);
        for (auto& s : tokens) s = "r" + std::to_string(static_cast<int>(std::abs(g(rng)) * 60));
        const auto vocab = build_vocabulary(tokens);
        LoadedCorpus data{vocab, make_corpus({tokens, {}}, vocab)};
        TrainConfig cfg;
        record(train_embedding(data, Method::glove, cfg));
        record(train_embedding(data, Method::word2vec, cfg));
    }
    std::size_t loss_bad = 0;
    for (const auto& loss : glove_losses) {
        int increases = 0;
        for (std::size_t i = 1; i < 5 && i < loss.size(); ++i) {
            if (loss[i] > loss[i - 1]) {
                ++increases;
                if (loss[i] > loss[i - 1] * 1.01) increases += 10;
            }
        }
        if (increases > 1) ++loss_bad;
    }
    check(o, loss_bad == 0, std::to_string(loss_bad) + " GloVe loss curves rose");
    check(o, matrices_non_finite == 0, std::to_string(matrices_non_finite) + " matrices with NaN/Inf");

    const double elapsed = seconds_since(start);
    check(o, elapsed < 120.0, "took longer than 2 minutes");
    o.detail += "1e5 RS pairs, 50 k-means instances, 200 histograms, 30 co-occurrence corpora, " +
                std::to_string(glove_losses.size()) + " GloVe loss curves, " + std::to_string(matrices_checked) +
                " trained matrices finite, in " + fmt("%.1f s", elapsed);
    return o;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

Outcome criterion_determinism() {
    Outcome o;
    const auto base = fs::temp_directory_path() / "wordrhyme_acceptance_determinism";
    fs::remove_all(base);
    const fs::path fixture = kData / "fixture" / "sonnets_head.txt";
    for (const char* run : {"a", "b"}) {
        const std::string cmd = std::string(WORDRHYME_CLI) + " run --corpus " + fixture.string() +
                                " --threads 1 --embedding-seed 5 --clustering-seed 6 --baseline-seed 7 --out " +
                                (base / run).string() + " >/dev/null 2>&1";
        const int status = std::system(cmd.c_str());
        check(o, WIFEXITED(status) && WEXITSTATUS(status) == 0, std::string("pipeline run ") + run + " failed");
    }
    std::size_t files = 0, differ = 0;
    for (const auto& e : fs::recursive_directory_iterator(base / "a")) {
        if (!e.is_regular_file()) continue;
        ++files;
        const auto rel = fs::relative(e.path(), base / "a");
        if (!fs::exists(base / "b" / rel) || slurp(e.path()) != slurp(base / "b" / rel)) {
            ++differ;
            o.detail += "differs: " + rel.string() + "; ";
        }
    }
    std::size_t files_b = 0;
    for (const auto& e : fs::recursive_directory_iterator(base / "b")) files_b += e.is_regular_file();
    check(o, files > 0 && differ == 0 && files == files_b, "outputs differ");
    o.detail += std::to_string(files) + " output files compared byte for byte, " + std::to_string(differ) + " differ";
    fs::remove_all(base);
    return o;
}

}  // namespace

int main() {
    auto guarded = [](const std::string& id, const std::function<Outcome()>& fn, bool gating = true) {
        try {
            report(id, fn(), gating);
        } catch (const std::exception& e) {
            report(id, {false, std::string("threw: ") + e.what()}, gating);
        }
    };
    guarded("1 (RS exact examples)", criterion_rs_examples);
    guarded("2 (per-cluster and corpus means vs brute force)", criterion_aggregates);
    guarded("3 (random baseline in [4%, 8%] on >=15k-word corpus, <5 min)", criterion_random_baseline);

    HypothesisResult hyp;
    guarded("4 (embeddings beat size-matched random by >=0.3 pp, <30 min)",
            [&] { return criterion_hypothesis(hyp); });
    guarded(
        "5 (GloVe vs Word2Vec ordering)",
        [&] {
            const bool glove_higher = hyp.embedding[1] > hyp.embedding[0];
            return Outcome{true, std::string("GloVe ") + (glove_higher ? "exceeds" : "does not exceed") +
                                     " Word2Vec (" + fmt("%.2f", hyp.embedding[1]) + " vs " +
                                     fmt("%.2f", hyp.embedding[0]) + ")"};
        },
        false);
    guarded("6 (property suites, <2 min)", criterion_properties);
    guarded("7 (bit-identical reruns with --threads 1)", criterion_determinism);
    std::printf("%s: %d gating criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
    return failures == 0 ? 0 : 1;
}
