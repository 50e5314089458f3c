#include <gtest/gtest.h>

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "wordrhyme/rhythm.hpp"

using namespace wordrhyme;

namespace {

void expect_fraction(const RsScore& s, std::size_t num, std::size_t den) {
    EXPECT_EQ(s.matches, num);
    EXPECT_EQ(s.length, den);
}

IpaLexicon lexicon(const char* tsv) {
    std::istringstream is(tsv);
    return IpaLexicon::parse(is);
}

}  // namespace

TEST(RsBasic, HandExamples) {
    expect_fraction(rs_basic("hustle", "bustle"), 5, 6);
    expect_fraction(rs_basic("holy", "technology"), 2, 10);
    expect_fraction(rs_basic("rotation", "positions"), 0, 9);
    expect_fraction(rs_basic("refine", "devise"), 3, 6);
    expect_fraction(rs_basic("cheese", "peas"), 1, 6);
    EXPECT_EQ(rs_basic("refine", "devise"), (RsScore{1, 2}));
    EXPECT_DOUBLE_EQ(rs_basic("hustle", "bustle").percent(), 500.0 / 6.0);
}

TEST(RsBasic, IdentityAndErrors) {
    for (const char* w : {"a", "gloom", "\xC3\xA9t\xC3\xA9"}) EXPECT_EQ(rs_basic(w, w).value(), 1.0);
    EXPECT_THROW(rs_basic("", "a"), InvalidArgumentError);
    EXPECT_THROW(rs_basic("a", ""), InvalidArgumentError);
}

TEST(RsBasic, CountsScalarValuesNotBytes) {
    // é is two bytes but one character.
    expect_fraction(rs_basic("\xC3\xA9t\xC3\xA9", "t\xC3\xA9"), 2, 3);
}

TEST(RsProperty, SymmetryRangeAndDenominator) {
    std::mt19937_64 rng(77);
    for (int i = 0; i < 100000; ++i) {
        const auto a = oracle::random_word(rng, 12, 4);
        const auto b = oracle::random_word(rng, 12, 4);
        const auto ab = rs_basic(a, b);
        const auto ba = rs_basic(b, a);
        ASSERT_EQ(ab.matches, ba.matches);
        ASSERT_EQ(ab.length, ba.length);
        ASSERT_EQ(ab.length, std::max(a.size(), b.size()));
        ASSERT_LE(ab.matches, std::min(a.size(), b.size()));
        ASSERT_GE(ab.value(), 0.0);
        ASSERT_LE(ab.value(), 1.0);
        const auto [num, den] = oracle::rs_fraction(a, b);
        ASSERT_EQ(ab.matches, num);
        ASSERT_EQ(ab.length, den);
        if (a == b) {
            ASSERT_EQ(ab.value(), 1.0);
        }
    }
}

TEST(RsIpa, HandExample) {
    const auto lex = lexicon("cheese\tt\xCA\x83i\xCB\x90z\npeas\tpi\xCB\x90z\n");
    expect_fraction(rs_ipa("cheese", "peas", lex), 3, 5);
}

TEST(RsIpa, IdenticalTranscriptionsAndLookupError) {
    const auto lex = lexicon("# comment\nsea\tsi\xCB\x90\nsee\tsi\xCB\x90\ncheese\tt\xCA\x83i\xCB\x90z\n");
    EXPECT_EQ(rs_ipa("sea", "see", lex).value(), 1.0);
    try {
        rs_ipa("cheese", "xyz", lex);
        FAIL() << "expected LookupError";
    } catch (const LookupError& e) {
        EXPECT_EQ(e.word(), "xyz");
    }
}

TEST(IpaLexicon, StripsMarksFoldsKeysAndWarnsOnDuplicates) {
    const auto lex = lexicon("Rotation\tro\xCA\x8A\xCB\x88te\xC9\xAA.\xCA\x83\xC9\x99n\r\nrotation\tro\xCA\x8At\n");
    EXPECT_EQ(lex.size(), 1u);
    ASSERT_EQ(lex.warnings().size(), 1u);
    EXPECT_EQ(lex.at("rotation"), U"roʊt");
    const auto marks = lexicon("x\t\xCB\x88\xCB\x8C" "a.b\n");
    EXPECT_EQ(marks.at("x"), U"ab");
    EXPECT_THROW(lexicon("novalue\n"), DataError);
    EXPECT_THROW(lexicon("empty\t\xCB\x88\n"), DataError);
}

TEST(ClusterMean, Examples) {
    auto basic = [](const std::string& a, const std::string& b) { return rs_basic(a, b); };
    const std::vector<std::string> doom{"doom", "gloom"};
    EXPECT_DOUBLE_EQ(cluster_mean_rs(doom, basic).mean_rs, 0.6);
    const std::vector<std::string> same{"a", "a", "a"};
    EXPECT_DOUBLE_EQ(cluster_mean_rs(same, basic).mean_rs, 1.0);
    const std::vector<std::string> one{"solo"};
    const auto s = cluster_mean_rs(one, basic);
    EXPECT_TRUE(s.excluded);
    EXPECT_EQ(s.n_pairs, 0u);
}

TEST(ClusterMean, MatchesDoubleLoopOracle) {
    std::mt19937_64 rng(5);
    auto basic = [](const std::string& a, const std::string& b) { return rs_basic(a, b); };
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng() % 30;
        std::vector<std::u32string> w32;
        std::vector<std::string> w8;
        for (std::size_t i = 0; i < n; ++i) {
            w32.push_back(oracle::random_word(rng));
            w8.push_back(oracle::to_utf8_ascii(w32.back()));
        }
        const auto s = cluster_mean_rs(w8, basic);
        EXPECT_EQ(s.excluded, n < 2);
        EXPECT_EQ(s.n_pairs, n * (n - 1) / 2);
        EXPECT_NEAR(s.mean_rs, oracle::cluster_mean(w32), 1e-12);
    }
}

TEST(CorpusMean, Examples) {
    const std::vector<double> two{0.5, 0.7};
    EXPECT_DOUBLE_EQ(corpus_mean_rs(two, std::vector<bool>(2, false)), 0.6);
    const std::vector<double> same(17, 0.3);
    EXPECT_NEAR(corpus_mean_rs(same, std::vector<bool>(17, false)), 0.3, 1e-15);
    const std::vector<double> masked{0.5, 0.9, 0.7};
    EXPECT_DOUBLE_EQ(corpus_mean_rs(masked, {false, true, false}), 0.6);
    EXPECT_THROW(corpus_mean_rs(two, {true, true}), DegenerateInputError);
    EXPECT_THROW(corpus_mean_rs(two, {true}), InvalidArgumentError);
}

TEST(CorpusMean, MatchesCompensatedSummation) {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> values(1 + rng() % 5000);
        for (auto& v : values) v = u(rng);
        EXPECT_NEAR(corpus_mean_rs(values, std::vector<bool>(values.size(), false)),
                    oracle::compensated_mean(values), 1e-12);
    }
}

TEST(Evaluate, ScoresClustersAndExcludesSingletons) {
    const Clustering c({"hustle", "bustle", "solo", "cheese", "peas", "a"}, 4, {0, 0, 1, 2, 2, 3},
                       Provenance::embedding);
    const auto s = evaluate_clustering(c);
    EXPECT_EQ(s.excluded_clusters, 2u);
    EXPECT_DOUBLE_EQ(s.per_cluster[0].mean_rs, 5.0 / 6.0);
    EXPECT_DOUBLE_EQ(s.per_cluster[2].mean_rs, 1.0 / 6.0);
    EXPECT_DOUBLE_EQ(s.corpus_mean, 0.5);
    EXPECT_EQ(s.total_pairs, 2u);
    EXPECT_EQ(s.fallback_rate(), 0.0);

    const Clustering singletons({"a", "b"}, 2, {0, 1}, Provenance::random);
    EXPECT_THROW(evaluate_clustering(singletons), DegenerateInputError);
}

TEST(Evaluate, IpaWithFallbackRate) {
    const auto lex = lexicon("cheese\tt\xCA\x83i\xCB\x90z\npeas\tpi\xCB\x90z\n");
    const Clustering c({"cheese", "peas", "hustle", "bustle"}, 2, {0, 0, 1, 1}, Provenance::embedding);
    const auto s = evaluate_clustering(c, MetricKind::ipa, &lex);
    EXPECT_DOUBLE_EQ(s.per_cluster[0].mean_rs, 0.6);
    EXPECT_DOUBLE_EQ(s.per_cluster[1].mean_rs, 5.0 / 6.0);
    EXPECT_EQ(s.fallback_pairs, 1u);
    EXPECT_DOUBLE_EQ(s.fallback_rate(), 0.5);
    EXPECT_THROW(evaluate_clustering(c, MetricKind::ipa, nullptr), ConfigError);
}

TEST(Evaluate, ThreadCountDoesNotChangeScores) {
    std::mt19937_64 rng(12);
    std::vector<std::string> words;
    std::vector<std::uint32_t> assign;
    for (int i = 0; i < 2000; ++i) {
        words.push_back(oracle::to_utf8_ascii(oracle::random_word(rng)) + std::to_string(i));
        assign.push_back(static_cast<std::uint32_t>(rng() % 50));
    }
    const Clustering c(words, 50, assign, Provenance::random);
    const auto a = evaluate_clustering(c, MetricKind::basic, nullptr, 1);
    const auto b = evaluate_clustering(c, MetricKind::basic, nullptr, 4);
    EXPECT_EQ(a.corpus_mean, b.corpus_mean);
    for (std::size_t i = 0; i < 50; ++i) EXPECT_EQ(a.per_cluster[i].mean_rs, b.per_cluster[i].mean_rs);
}
