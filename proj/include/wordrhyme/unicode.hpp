#pragma once

// Thin wrappers over ICU for the handful of Unicode operations the corpus
// and metric code need: strict UTF-8 decoding, NFC, simple case folding and
// the letter/mark test used by the tokenizer.

#include <cstdint>
#include <string>
#include <string_view>

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "wordrhyme/error.hpp"

namespace wordrhyme::unicode {

/// Calls fn(code_point, byte_offset) for each scalar value; throws
/// IngestionError at the first ill-formed sequence.
template <typename Fn>
void for_each_code_point(std::string_view text, Fn&& fn) {
    const auto* s = reinterpret_cast<const std::uint8_t*>(text.data());
    const auto length = static_cast<std::int64_t>(text.size());
    std::int64_t i = 0;
    while (i < length) {
        const std::int64_t start = i;
        UChar32 c;
        U8_NEXT(s, i, length, c);
        if (c < 0) {
            throw IngestionError("invalid UTF-8 sequence", static_cast<std::size_t>(start));
        }
        fn(static_cast<char32_t>(c), static_cast<std::size_t>(start));
    }
}

inline std::u32string decode_utf8(std::string_view text) {
    std::u32string out;
    out.reserve(text.size());
    for_each_code_point(text, [&](char32_t c, std::size_t) { out.push_back(c); });
    return out;
}

inline void append_utf8(std::string& out, char32_t c) {
    std::uint8_t buf[U8_MAX_LENGTH];
    std::int32_t n = 0;
    UBool error = false;
    U8_APPEND(buf, n, U8_MAX_LENGTH, static_cast<UChar32>(c), error);
    if (error) {
        throw InvalidArgumentError("code point is not a Unicode scalar value");
    }
    out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(n));
}

inline std::string encode_utf8(std::u32string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char32_t c : text) append_utf8(out, c);
    return out;
}

/// Number of Unicode scalar values in a valid UTF-8 string.
inline std::size_t length(std::string_view text) {
    std::size_t n = 0;
    for_each_code_point(text, [&](char32_t, std::size_t) { ++n; });
    return n;
}

/// Canonical composition (NFC). Input must already be valid UTF-8.
inline std::string to_nfc(std::string_view text) {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status)) {
        throw Error(std::string("ICU NFC normalizer unavailable: ") + u_errorName(status));
    }
    const auto source = icu::UnicodeString::fromUTF8(
        icu::StringPiece(text.data(), static_cast<std::int32_t>(text.size())));
    if (nfc->isNormalized(source, status) && U_SUCCESS(status)) {
        return std::string(text);
    }
    status = U_ZERO_ERROR;
    const icu::UnicodeString normalized = nfc->normalize(source, status);
    if (U_FAILURE(status)) {
        throw Error(std::string("NFC normalization failed: ") + u_errorName(status));
    }
    std::string out;
    normalized.toUTF8String(out);
    return out;
}

/// Simple (one-to-one) case folding.
inline char32_t fold_case(char32_t c) {
    return static_cast<char32_t>(u_foldCase(static_cast<UChar32>(c), U_FOLD_CASE_DEFAULT));
}

/// True for general categories L* and M*.
inline bool is_letter_or_mark(char32_t c) {
    return (U_GET_GC_MASK(static_cast<UChar32>(c)) & (U_GC_L_MASK | U_GC_M_MASK)) != 0;
}

}  // namespace wordrhyme::unicode
