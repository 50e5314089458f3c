#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "wordrhyme/corpus.hpp"

using namespace wordrhyme;

namespace {

std::vector<std::string> words(std::initializer_list<const char*> list) {
    return {list.begin(), list.end()};
}

}  // namespace

TEST(Tokenize, StripsPunctuationAndLowercases) {
    EXPECT_EQ(tokenize("Doom, and gloom!"), words({"doom", "and", "gloom"}));
    EXPECT_TRUE(tokenize("").empty());
    EXPECT_EQ(tokenize("cheese peas cheese"), words({"cheese", "peas", "cheese"}));
}

TEST(Tokenize, DigitsAndApostrophesSeparateWords) {
    EXPECT_EQ(tokenize("feed'st 12 times\tX2y"), words({"feed", "st", "times", "x", "y"}));
}

TEST(Tokenize, UnicodeLettersAndMarks) {
    // Decomposed e + combining acute composes under NFC.
    EXPECT_EQ(tokenize("Cafe\xCC\x81 \xC3\x89T\xC3\x89"), words({"caf\xC3\xA9", "\xC3\xA9t\xC3\xA9"}));
    // Arabic letters with a harakat mark stay one token.
    EXPECT_EQ(tokenize("\xD9\x83\xD9\x8E\xD8\xAA\xD8\xA8"), words({"\xD9\x83\xD9\x8E\xD8\xAA\xD8\xA8"}));
    EXPECT_EQ(tokenize("STRASSE Stra\xC3\x9F" "e"), words({"strasse", "stra\xC3\x9F" "e"}));
}

TEST(Tokenize, InvalidUtf8ReportsByteOffset) {
    try {
        tokenize("ok \xC3(");
        FAIL() << "expected IngestionError";
    } catch (const IngestionError& e) {
        EXPECT_EQ(e.byte_offset(), 3u);
    }
    EXPECT_THROW(tokenize("\xED\xA0\x80"), IngestionError);  // surrogate
    EXPECT_THROW(tokenize("\xC0\xAF"), IngestionError);      // overlong
}

TEST(Tokenize, SentenceBreaks) {
    TokenizerConfig rules;
    rules.sentence_breaks = true;
    const auto s = tokenize_stream("One two. Three!\nFour? ", rules);
    EXPECT_EQ(s.tokens, words({"one", "two", "three", "four"}));
    EXPECT_EQ(s.sentence_breaks, (std::vector<std::size_t>{2, 3}));
    EXPECT_TRUE(tokenize_stream("One two. Three", {}).sentence_breaks.empty());
}

TEST(Vocabulary, CountsAndIds) {
    const auto tokens = words({"a", "b", "a"});
    const auto v = build_vocabulary(tokens, 1);
    ASSERT_EQ(v.size(), 2u);
    EXPECT_EQ(*v.id("a"), 0u);
    EXPECT_EQ(*v.id("b"), 1u);
    EXPECT_EQ(v.count(0), 2u);
    EXPECT_EQ(v.count(1), 1u);
    EXPECT_FALSE(v.id("c").has_value());

    const auto v2 = build_vocabulary(tokens, 2);
    ASSERT_EQ(v2.size(), 1u);
    EXPECT_EQ(v2.word(0), "a");
    EXPECT_EQ(v2.count(0), 2u);
    EXPECT_THROW(build_vocabulary(tokens, 0), ConfigError);
}

TEST(Vocabulary, UniqueWordsMatchesSetOracle) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> letter('a', 'e');
    std::uniform_int_distribution<int> len(1, 3);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::string> tokens(500);
        for (auto& t : tokens) {
            t.resize(len(rng));
            for (auto& c : t) c = static_cast<char>(letter(rng));
        }
        const std::set<std::string> oracle(tokens.begin(), tokens.end());
        const auto v = build_vocabulary(tokens);
        EXPECT_EQ(v.size(), oracle.size());
        std::uint64_t total = 0;
        for (auto c : v.counts()) total += c;
        EXPECT_EQ(total, tokens.size());
    }
}

TEST(Corpus, MinCountDropsTokensAndShiftsBreaks) {
    TokenStream s{words({"a", "x", "b", "a", "y", "b"}), {3}};
    const auto v = build_vocabulary(s.tokens, 2);
    const auto c = make_corpus(s, v);
    EXPECT_EQ(c.tokens, (std::vector<WordId>{0, 1, 0, 1}));
    EXPECT_EQ(c.sentence_breaks, (std::vector<std::size_t>{2}));
}

TEST(Corpus, Stats) {
    const auto tokens = words({"the", "cat", "the"});
    const auto v = build_vocabulary(tokens);
    const auto st = corpus_stats(make_corpus({tokens, {}}, v), v);
    EXPECT_EQ(st.total_tokens, 3u);
    EXPECT_EQ(st.unique_words, 2u);
    EXPECT_DOUBLE_EQ(st.avg_word_length, 3.0);

    const auto one = words({"a"});
    const auto v1 = build_vocabulary(one);
    const auto s1 = corpus_stats(make_corpus({one, {}}, v1), v1);
    EXPECT_EQ(s1.total_tokens, 1u);
    EXPECT_EQ(s1.unique_words, 1u);
    EXPECT_DOUBLE_EQ(s1.avg_word_length, 1.0);

    const Vocabulary empty;
    const auto s0 = corpus_stats({}, empty);
    EXPECT_EQ(s0.total_tokens, 0u);
    EXPECT_EQ(s0.avg_word_length, 0.0);
    EXPECT_EQ(stats_csv_row("x", s0), "x,0,0,0.00");
}

TEST(Corpus, LengthCountsScalarValues) {
    const auto tokens = tokenize("\xC3\xA9t\xC3\xA9");
    const auto v = build_vocabulary(tokens);
    EXPECT_DOUBLE_EQ(corpus_stats(make_corpus({tokens, {}}, v), v).avg_word_length, 3.0);
}

TEST(Corpus, LoadFilesReportsFileAndOffset) {
    const auto dir = std::filesystem::temp_directory_path() / "wordrhyme_corpus_test";
    std::filesystem::create_directories(dir);
    {
        std::ofstream(dir / "good.txt", std::ios::binary) << "Hello world.";
        std::ofstream(dir / "bad.txt", std::ios::binary) << "abc\xFF";
    }
    const std::vector<std::filesystem::path> good{dir / "good.txt", dir / "good.txt"};
    TokenizerConfig rules;
    rules.sentence_breaks = true;
    const auto s = load_token_stream(good, rules);
    EXPECT_EQ(s.tokens.size(), 4u);
    EXPECT_EQ(s.sentence_breaks, (std::vector<std::size_t>{2}));

    const std::vector<std::filesystem::path> bad{dir / "bad.txt"};
    try {
        load_token_stream(bad);
        FAIL() << "expected IngestionError";
    } catch (const IngestionError& e) {
        EXPECT_EQ(e.byte_offset(), 3u);
        EXPECT_NE(std::string(e.what()).find("bad.txt"), std::string::npos);
    }
    const std::vector<std::filesystem::path> missing{dir / "missing.txt"};
    EXPECT_THROW(load_token_stream(missing), DataError);
    std::filesystem::remove_all(dir);
}
