#include <doctest.h>

#include "factcheck/lexical_index.hpp"
#include "factcheck/text.hpp"

using namespace factcheck;

TEST_CASE("code points, not bytes")
{
    CHECK(text::code_point_length("lodí") == 4);
    CHECK(text::code_point_length("") == 0);
    CHECK(text::slice("příliš žluťoučký", 7, 16) == "žluťoučký");
    CHECK(text::slice("abc", 2, 99) == "c");
    CHECK(text::to_utf8(text::to_u32("kůň")) == "kůň");
}

TEST_CASE("lowercasing is Unicode aware")
{
    CHECK(text::to_lower("ŽLUŤOUČKÝ Kůň") == "žluťoučký kůň");
    CHECK(text::to_lower("USS Indianapolis") == "uss indianapolis");
}

TEST_CASE("word segmentation keeps code-point offsets and skips punctuation")
{
    const auto words = text::segment_words("Beck, Bogert & Appice");
    REQUIRE(words.size() == 3);
    CHECK(words[0].text == "Beck");
    CHECK(words[0].start == 0);
    CHECK(words[0].end == 4);
    CHECK(words[1].text == "Bogert");
    CHECK(words[1].start == 6);
    CHECK(words[2].text == "Appice");
    CHECK(words[2].start == 15);

    const auto czech = text::segment_words("vrak lodí");
    REQUIRE(czech.size() == 2);
    CHECK(czech[1].start == 5);
    CHECK(czech[1].end == 9);
}

TEST_CASE("tokenize lowercases words and drops punctuation")
{
    CHECK(tokenize("Vrak lodi USS Indianapolis") ==
          std::vector<std::string>{"vrak", "lodi", "uss", "indianapolis"});
    CHECK(tokenize("").empty());
    CHECK(tokenize("Beck, Bogert & Appice") ==
          std::vector<std::string>{"beck", "bogert", "appice"});
    CHECK(tokenize("discovered in 2017.") ==
          std::vector<std::string>{"discovered", "in", "2017"});
}
