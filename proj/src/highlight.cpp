#include "factcheck/highlight.hpp"

#include <algorithm>

#include "factcheck/text.hpp"

namespace factcheck {

double jaro_winkler(std::u32string_view a, std::u32string_view b)
{
    if (a == b) {
        return 1.0;
    }
    if (a.empty() || b.empty()) {
        return 0.0;
    }
    const std::size_t longest = std::max(a.size(), b.size());
    const std::size_t window = longest / 2 > 0 ? longest / 2 - 1 : 0;

    std::vector<bool> a_matched(a.size(), false);
    std::vector<bool> b_matched(b.size(), false);
    std::size_t matches = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const std::size_t lo = i > window ? i - window : 0;
        const std::size_t hi = std::min(b.size(), i + window + 1);
        for (std::size_t j = lo; j < hi; ++j) {
            if (!b_matched[j] && a[i] == b[j]) {
                a_matched[i] = true;
                b_matched[j] = true;
                ++matches;
                break;
            }
        }
    }
    if (matches == 0) {
        return 0.0;
    }

    std::size_t half_transpositions = 0;
    for (std::size_t i = 0, j = 0; i < a.size(); ++i) {
        if (!a_matched[i]) {
            continue;
        }
        while (!b_matched[j]) {
            ++j;
        }
        if (a[i] != b[j]) {
            ++half_transpositions;
        }
        ++j;
    }

    const auto m = static_cast<double>(matches);
    const double transpositions = static_cast<double>(half_transpositions / 2);
    const double jaro = (m / static_cast<double>(a.size()) + m / static_cast<double>(b.size()) +
                         (m - transpositions) / m) /
                        3.0;
    if (jaro <= 0.7) {
        return jaro;
    }
    std::size_t prefix = 0;
    while (prefix < 4 && prefix < a.size() && prefix < b.size() && a[prefix] == b[prefix]) {
        ++prefix;
    }
    return jaro + static_cast<double>(prefix) * 0.1 * (1.0 - jaro);
}

double jaro_winkler(std::string_view a, std::string_view b)
{
    return jaro_winkler(text::to_u32(a), text::to_u32(b));
}

std::vector<HighlightSpan> highlight(std::string_view claim, std::string_view paragraph,
                                     const HighlightOptions &options)
{
    struct ClaimWord {
        std::string surface;
        std::u32string folded;
    };
    std::vector<ClaimWord> claim_words;
    for (auto &w : text::segment_words(claim)) {
        if (w.end - w.start >= options.min_word_len) {
            auto folded = text::to_u32(text::to_lower(w.text));
            claim_words.push_back(ClaimWord{std::move(w.text), std::move(folded)});
        }
    }

    std::vector<HighlightSpan> spans;
    if (claim_words.empty()) {
        return spans;
    }
    for (const auto &w : text::segment_words(paragraph)) {
        if (w.end - w.start < options.min_word_len) {
            continue;
        }
        const auto folded = text::to_u32(text::to_lower(w.text));
        const ClaimWord *best = nullptr;
        double best_similarity = 0.0;
        for (const auto &c : claim_words) {
            const double s = jaro_winkler(folded, c.folded);
            if (best == nullptr || s > best_similarity) {
                best = &c;
                best_similarity = s;
            }
        }
        if (best_similarity > options.threshold) {
            spans.push_back(HighlightSpan{w.start, w.end, best->surface, best_similarity});
        }
    }
    return spans;
}

json to_json(const HighlightSpan &span)
{
    return json{{"start", span.start},
                {"end", span.end},
                {"matched_claim_word", span.matched_claim_word},
                {"similarity", span.similarity}};
}

}  // namespace factcheck
