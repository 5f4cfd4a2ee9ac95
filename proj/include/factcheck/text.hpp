#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// UTF-8 helpers and Unicode word segmentation shared by the lexical index,
// the stub NER and the highlighter. All public offsets are code-point
// offsets, never byte offsets.

namespace factcheck::text {

[[nodiscard]] std::size_t code_point_length(std::string_view utf8);
[[nodiscard]] std::u32string to_u32(std::string_view utf8);
[[nodiscard]] std::string to_utf8(std::u32string_view code_points);

/// Code points [start, end) of `utf8`. Out-of-range bounds are clamped.
[[nodiscard]] std::string slice(std::string_view utf8, std::size_t start, std::size_t end);

/// Full Unicode lowercase (root locale).
[[nodiscard]] std::string to_lower(std::string_view utf8);

struct Word {
    std::string text;   // surface form, unmodified
    std::size_t start;  // code-point offset
    std::size_t end;
};

/// Words according to Unicode word-boundary rules (UAX #29). Segments made
/// of whitespace or punctuation only are not words.
[[nodiscard]] std::vector<Word> segment_words(std::string_view utf8);

}  // namespace factcheck::text
