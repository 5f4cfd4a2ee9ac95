#include <doctest.h>

#include <fstream>

#include "factcheck/highlight.hpp"
#include "factcheck/jsonl.hpp"

using namespace factcheck;

namespace {

// ASCII text only: spans are code-point offsets
std::vector<std::string> words_of(std::string_view claim, std::string_view text)
{
    std::vector<std::string> out;
    for (const auto &s : highlight(claim, text)) {
        out.push_back(std::string(text.substr(s.start, s.end - s.start)));
    }
    return out;
}

}  // namespace

TEST_CASE("Jaro-Winkler matches the reference implementation")
{
    std::ifstream in(FACTCHECK_TEST_DATA_DIR "/jaro_winkler_reference.json");
    REQUIRE(in);
    const json pairs = json::parse(in);
    REQUIRE(pairs.size() == 50);
    for (const auto &p : pairs) {
        const std::string a = p["a"];
        const std::string b = p["b"];
        INFO(a << " / " << b);
        CHECK(jaro_winkler(a, b) == doctest::Approx(p["similarity"].get<double>()).epsilon(1e-9));
    }
}

TEST_CASE("Jaro-Winkler edge cases")
{
    CHECK(jaro_winkler("", "") == 1.0);
    CHECK(jaro_winkler("abc", "") == 0.0);
    CHECK(jaro_winkler("same", "same") == 1.0);
    CHECK(jaro_winkler("martha", "marhta") == doctest::Approx(0.961111111111));
    CHECK(jaro_winkler("abcd", "wxyz") == 0.0);
    for (auto [a, b] : {std::pair{"dixon", "dicksonx"}, std::pair{"lodi", "lodí"},
                        std::pair{"crate", "trace"}}) {
        CHECK(jaro_winkler(a, b) == jaro_winkler(b, a));
    }
}

TEST_CASE("the wreckage example highlights shared content words")
{
    const std::string claim = "The wreckage of the USS Indianapolis was discovered on August 2, 1995.";
    const std::string text =
        "On August 19, 2017, the wreckage of the ship was discovered in the Philippine Sea. "
        "The USS memorial honors Indianapolis sailors.";
    const auto spans = highlight(claim, text);
    REQUIRE(spans.size() == 4);
    CHECK(spans[0].start == 3);
    CHECK(spans[0].end == 9);
    CHECK(spans[0].matched_claim_word == "August");
    CHECK(words_of(claim, text) ==
          std::vector<std::string>{"August", "wreckage", "discovered", "Indianapolis"});
    for (const auto &s : spans) {
        CHECK(s.similarity > 0.8);
    }
}

TEST_CASE("short words never highlight")
{
    CHECK(words_of("USS the was", "USS the was").empty());
    CHECK(words_of("USS Indianapolis", "USS").empty());
}

TEST_CASE("comparison is case-insensitive and Unicode aware")
{
    const auto lodi = highlight("LODI", "the town of lodí");
    REQUIRE(lodi.size() == 1);
    CHECK(lodi[0].start == 12);
    CHECK(lodi[0].end == 16);
    CHECK(lodi[0].similarity == doctest::Approx(0.883333333333));
    const auto spans = highlight("Ærøskøbing", "ærøskøbing harbour");
    REQUIRE(spans.size() == 1);
    CHECK(spans[0].start == 0);
    CHECK(spans[0].end == 10);
    CHECK(spans[0].similarity == 1.0);
}

TEST_CASE("the threshold is strict and configurable")
{
    const double s = jaro_winkler("lodi", "lodí");
    HighlightOptions strict;
    strict.threshold = s;
    CHECK(highlight("lodi", "lodí", strict).empty());
    strict.threshold = s - 1e-9;
    CHECK(highlight("lodi", "lodí", strict).size() == 1);
    CHECK(highlight("", "some words here").empty());
    CHECK(highlight("some words", "").empty());
}

TEST_CASE("spans serialize")
{
    const json doc = to_json(HighlightSpan{3, 9, "August", 1.0});
    CHECK(doc["start"] == 3);
    CHECK(doc["end"] == 9);
    CHECK(doc["matched_claim_word"] == "August");
}
