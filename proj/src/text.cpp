#include "factcheck/text.hpp"

#include <memory>

#include <unicode/brkiter.h>
#include <unicode/locid.h>
#include <unicode/unistr.h>
#include <unicode/utext.h>
#include <unicode/utf8.h>

#include "factcheck/error.hpp"

namespace factcheck::text {

namespace {

constexpr char32_t replacement_char = 0xFFFD;

template <typename Fn>
void for_each_code_point(std::string_view utf8, Fn &&fn)
{
    const auto *bytes = reinterpret_cast<const uint8_t *>(utf8.data());
    const auto length = static_cast<int32_t>(utf8.size());
    int32_t i = 0;
    while (i < length) {
        const int32_t begin = i;
        UChar32 c = 0;
        U8_NEXT(bytes, i, length, c);
        fn(c < 0 ? replacement_char : static_cast<char32_t>(c), begin);
    }
}

icu::BreakIterator &word_iterator()
{
    thread_local std::unique_ptr<icu::BreakIterator> iterator = [] {
        UErrorCode status = U_ZERO_ERROR;
        std::unique_ptr<icu::BreakIterator> it(
            icu::BreakIterator::createWordInstance(icu::Locale::getRoot(), status));
        if (U_FAILURE(status)) {
            throw Error(std::string("ICU word break iterator: ") + u_errorName(status));
        }
        return it;
    }();
    return *iterator;
}

}  // namespace

std::size_t code_point_length(std::string_view utf8)
{
    std::size_t n = 0;
    for_each_code_point(utf8, [&n](char32_t, int32_t) { ++n; });
    return n;
}

std::u32string to_u32(std::string_view utf8)
{
    std::u32string out;
    out.reserve(utf8.size());
    for_each_code_point(utf8, [&out](char32_t c, int32_t) { out.push_back(c); });
    return out;
}

std::string to_utf8(std::u32string_view code_points)
{
    std::string out;
    out.reserve(code_points.size());
    for (char32_t c : code_points) {
        uint8_t buf[U8_MAX_LENGTH];
        int32_t n = 0;
        UBool error = false;
        U8_APPEND(buf, n, U8_MAX_LENGTH, static_cast<UChar32>(c), error);
        if (error) {
            n = 0;
            U8_APPEND_UNSAFE(buf, n, replacement_char);
        }
        out.append(reinterpret_cast<const char *>(buf), static_cast<std::size_t>(n));
    }
    return out;
}

std::string slice(std::string_view utf8, std::size_t start, std::size_t end)
{
    std::size_t begin_byte = utf8.size();
    std::size_t end_byte = utf8.size();
    std::size_t index = 0;
    for_each_code_point(utf8, [&](char32_t, int32_t byte) {
        if (index == start) {
            begin_byte = static_cast<std::size_t>(byte);
        }
        if (index == end) {
            end_byte = static_cast<std::size_t>(byte);
        }
        ++index;
    });
    if (begin_byte >= end_byte) {
        return {};
    }
    return std::string(utf8.substr(begin_byte, end_byte - begin_byte));
}

std::string to_lower(std::string_view utf8)
{
    auto s = icu::UnicodeString::fromUTF8(
        icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
    std::string out;
    s.toLower(icu::Locale::getRoot()).toUTF8String(out);
    return out;
}

std::vector<Word> segment_words(std::string_view utf8)
{
    std::vector<Word> words;
    if (utf8.empty()) {
        return words;
    }

    UErrorCode status = U_ZERO_ERROR;
    UText *ut = utext_openUTF8(nullptr, utf8.data(), static_cast<int64_t>(utf8.size()), &status);
    if (U_FAILURE(status)) {
        throw Error(std::string("ICU utext_openUTF8: ") + u_errorName(status));
    }
    auto &it = word_iterator();
    it.setText(ut, status);
    if (U_FAILURE(status)) {
        utext_close(ut);
        throw Error(std::string("ICU setText: ") + u_errorName(status));
    }

    // Boundaries are byte offsets; code-point offsets are accumulated while walking.
    std::size_t cp_offset = 0;
    int32_t prev = it.first();
    for (int32_t next = it.next(); next != icu::BreakIterator::DONE; prev = next, next = it.next()) {
        const auto piece = utf8.substr(static_cast<std::size_t>(prev),
                                       static_cast<std::size_t>(next - prev));
        const std::size_t cp_len = code_point_length(piece);
        if (it.getRuleStatus() >= UBRK_WORD_NONE_LIMIT) {
            words.push_back(Word{std::string(piece), cp_offset, cp_offset + cp_len});
        }
        cp_offset += cp_len;
    }
    // Detach before closing so the cached iterator never sees a dangling UText.
    it.setText(icu::UnicodeString());
    utext_close(ut);
    return words;
}

}  // namespace factcheck::text
