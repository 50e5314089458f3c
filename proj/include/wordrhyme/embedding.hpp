#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "wordrhyme/corpus.hpp"
#include "wordrhyme/error.hpp"

namespace wordrhyme {

enum class Method { word2vec, glove };

inline std::string_view to_string(Method m) {
    return m == Method::word2vec ? "word2vec" : "glove";
}

inline Method parse_method(std::string_view s) {
    if (s == "word2vec") return Method::word2vec;
    if (s == "glove") return Method::glove;
    throw ConfigError("unknown embedding method '" + std::string(s) + "' (expected word2vec|glove)");
}

enum class Word2VecMode { cbow, skipgram };

inline std::string_view to_string(Word2VecMode m) {
    return m == Word2VecMode::cbow ? "cbow" : "skipgram";
}

inline Word2VecMode parse_word2vec_mode(std::string_view s) {
    if (s == "cbow") return Word2VecMode::cbow;
    if (s == "skipgram" || s == "skip-gram" || s == "sg") return Word2VecMode::skipgram;
    throw ConfigError("unknown word2vec mode '" + std::string(s) + "' (expected cbow|skipgram)");
}

/// Hyperparameters for both trainers. Defaults follow Gensim 4.1.2 for
/// word2vec and the GloVe demo script for GloVe, with dim/window/min_count
/// overridden to 100/15/1.
struct TrainConfig {
    std::size_t dim = 100;
    std::size_t window = 15;
    std::uint64_t min_count = 1;
    std::uint64_t seed = 1;
    std::size_t threads = 1;

    // word2vec
    Word2VecMode mode = Word2VecMode::cbow;
    std::size_t negative = 5;
    std::size_t epochs = 5;
    double w2v_alpha = 0.025;
    double w2v_min_alpha = 0.0001;
    double sample = 1e-3;
    double ns_exponent = 0.75;

    // glove
    double x_max = 10.0;
    double glove_alpha = 0.75;
    std::size_t glove_iterations = 15;
    double glove_eta = 0.05;

    void validate() const {
        if (dim < 1) throw ConfigError("dim must be >= 1");
        if (window < 1) throw ConfigError("window must be >= 1");
        if (min_count < 1) throw ConfigError("min_count must be >= 1");
        if (threads < 1) throw ConfigError("threads must be >= 1");
        if (epochs < 1) throw ConfigError("epochs must be >= 1");
        if (glove_iterations < 1) throw ConfigError("glove iterations must be >= 1");
        if (!(w2v_alpha > 0) || !(glove_eta > 0) || !(x_max > 0) || !(glove_alpha > 0)) {
            throw ConfigError("learning rates, x_max and alpha must be > 0");
        }
        if (w2v_min_alpha < 0 || sample < 0) throw ConfigError("min_alpha and sample must be >= 0");
    }
};

/// One row of `dim` doubles per vocabulary word, stored row-major.
class EmbeddingMatrix {
public:
    EmbeddingMatrix() = default;

    EmbeddingMatrix(std::vector<std::string> words, std::size_t dim, Method method)
        : words_(std::move(words)), dim_(dim), method_(method), data_(words_.size() * dim, 0.0) {
        if (dim == 0) throw ConfigError("embedding dimension must be >= 1");
    }

    std::size_t rows() const noexcept { return words_.size(); }
    std::size_t dim() const noexcept { return dim_; }
    Method method() const noexcept { return method_; }
    const std::vector<std::string>& words() const noexcept { return words_; }
    const std::string& word(std::size_t row) const { return words_.at(row); }

    std::span<double> row(std::size_t i) { return {data_.data() + i * dim_, dim_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }

    std::span<const double> data() const noexcept { return data_; }

    bool all_finite() const {
        for (double x : data_) {
            if (!std::isfinite(x)) return false;
        }
        return true;
    }

    friend bool operator==(const EmbeddingMatrix& a, const EmbeddingMatrix& b) {
        return a.dim_ == b.dim_ && a.words_ == b.words_ && a.data_ == b.data_;
    }

private:
    std::vector<std::string> words_;
    std::size_t dim_ = 0;
    Method method_ = Method::word2vec;
    std::vector<double> data_;
};

inline double dot(std::span<const double> u, std::span<const double> v) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
    return s;
}

inline double norm(std::span<const double> u) { return std::sqrt(dot(u, u)); }

inline double cosine(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) {
        throw InvalidArgumentError("cosine of vectors with different dimensions");
    }
    const double nu = norm(u);
    const double nv = norm(v);
    if (nu == 0.0 || nv == 0.0) {
        throw UndefinedSimilarityError("cosine similarity is undefined for a zero vector");
    }
    const double c = dot(u, v) / (nu * nv);
    return std::clamp(c, -1.0, 1.0);
}

namespace detail {

inline void append_double(std::string& out, double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    out.append(buf, res.ptr);
}

inline double parse_double(std::string_view s, std::size_t line) {
    double x = 0.0;
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    if (!s.empty() && *first == '+') ++first;
    const auto res = std::from_chars(first, last, x);
    if (res.ec != std::errc() || res.ptr != last) {
        throw DataError("line " + std::to_string(line) + ": cannot parse number '" + std::string(s) + "'");
    }
    return x;
}

inline std::vector<std::string_view> split_spaces(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

}  // namespace detail

/// Writes `word v1 ... vdim` lines with shortest round-trip decimals.
inline void write_embeddings(std::ostream& os, const EmbeddingMatrix& emb) {
    std::string line;
    for (std::size_t r = 0; r < emb.rows(); ++r) {
        line.clear();
        line += emb.word(r);
        for (double x : emb.row(r)) {
            line += ' ';
            detail::append_double(line, x);
        }
        line += '\n';
        os.write(line.data(), static_cast<std::streamsize>(line.size()));
    }
}

inline void write_embeddings(const std::filesystem::path& path, const EmbeddingMatrix& emb) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot write '" + path.string() + "'");
    write_embeddings(os, emb);
    if (!os) throw DataError("write failed for '" + path.string() + "'");
}

/// Reads the word-vector text format. A leading `count dim` header line, as
/// written by word2vec tools, is accepted and checked.
inline EmbeddingMatrix read_embeddings(std::istream& is, Method method = Method::word2vec) {
    std::vector<std::string> words;
    std::vector<double> values;
    std::size_t dim = 0;
    std::optional<std::size_t> declared_rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto fields = detail::split_spaces(line);
        if (fields.empty()) continue;
        if (line_no == 1 && fields.size() == 2) {
            std::size_t a = 0, b = 0;
            const auto r1 = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), a);
            const auto r2 = std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), b);
            if (r1.ec == std::errc() && r2.ec == std::errc() &&
                r1.ptr == fields[0].data() + fields[0].size() &&
                r2.ptr == fields[1].data() + fields[1].size()) {
                declared_rows = a;
                dim = b;
                continue;
            }
        }
        if (fields.size() < 2) {
            throw DataError("line " + std::to_string(line_no) + ": expected a word followed by values");
        }
        const std::size_t row_dim = fields.size() - 1;
        if (dim == 0) dim = row_dim;
        if (row_dim != dim) {
            throw DataError("line " + std::to_string(line_no) + ": expected " + std::to_string(dim) +
                            " values, found " + std::to_string(row_dim));
        }
        words.emplace_back(fields[0]);
        for (std::size_t i = 1; i < fields.size(); ++i) {
            values.push_back(detail::parse_double(fields[i], line_no));
        }
    }
    if (words.empty()) throw DataError("embedding file contains no vectors");
    if (declared_rows && *declared_rows != words.size()) {
        throw DataError("embedding header declares " + std::to_string(*declared_rows) +
                        " rows, found " + std::to_string(words.size()));
    }
    // Reject duplicates up front; later stages key everything by word.
    (void)Vocabulary::from_words(words);
    EmbeddingMatrix emb(std::move(words), dim, method);
    for (std::size_t r = 0; r < emb.rows(); ++r) {
        auto dst = emb.row(r);
        std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(r * dim), dim, dst.begin());
    }
    return emb;
}

inline EmbeddingMatrix read_embeddings(const std::filesystem::path& path, Method method = Method::word2vec) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open '" + path.string() + "'");
    return read_embeddings(is, method);
}

}  // namespace wordrhyme
