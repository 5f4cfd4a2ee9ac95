#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "factcheck/jsonl.hpp"

namespace factcheck {

/// Jaro–Winkler similarity over code points: match window
/// max(|a|, |b|) / 2 - 1, prefix scale 0.1 over at most four code points,
/// prefix boost applied when the Jaro similarity exceeds 0.7.
[[nodiscard]] double jaro_winkler(std::u32string_view a, std::u32string_view b);
[[nodiscard]] double jaro_winkler(std::string_view a, std::string_view b);

struct HighlightSpan {
    std::size_t start = 0;  // code-point offsets into the paragraph
    std::size_t end = 0;
    std::string matched_claim_word;
    double similarity = 0.0;
};

struct HighlightOptions {
    double threshold = 0.8;        // similarity must be strictly greater
    std::size_t min_word_len = 4;  // in code points, on both sides
};

/// Paragraph words resembling some claim word, case-insensitively, ordered by
/// position.
[[nodiscard]] std::vector<HighlightSpan> highlight(std::string_view claim,
                                                   std::string_view paragraph,
                                                   const HighlightOptions &options = {});

[[nodiscard]] json to_json(const HighlightSpan &span);

}  // namespace factcheck
