#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wordrhyme {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad parameters supplied by the caller (k larger than the vocabulary,
/// empty training input, mismatched size profiles, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Unknown option or unparsable option value.
class UsageError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// Malformed or inconsistent input data.
class DataError : public Error {
public:
    using Error::Error;
};

class IngestionError : public DataError {
public:
    IngestionError(const std::string& what, std::size_t byte_offset)
        : DataError(what + " at byte offset " + std::to_string(byte_offset)),
          offset_(byte_offset) {}

    std::size_t byte_offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Cosine similarity requested for a zero vector.
class UndefinedSimilarityError : public DataError {
public:
    using DataError::DataError;
};

/// Word missing from an IPA lexicon.
class LookupError : public DataError {
public:
    LookupError(const std::string& word)
        : DataError("no lexicon entry for word '" + word + "'"), word_(word) {}

    const std::string& word() const noexcept { return word_; }

private:
    std::string word_;
};

class InvalidArgumentError : public Error {
public:
    using Error::Error;
};

/// Every cluster was excluded from an aggregate.
class DegenerateInputError : public DataError {
public:
    using DataError::DataError;
};

/// An internal consistency check failed.
class InvariantError : public Error {
public:
    using Error::Error;
};

}  // namespace wordrhyme
