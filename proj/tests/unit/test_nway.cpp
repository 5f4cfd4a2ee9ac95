#include <doctest.h>

#include <set>

#include "factcheck/nway.hpp"
#include <random>

#include "factcheck/error.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace factcheck;

namespace {

struct Fixture {
    std::vector<oracle::Doc> docs;
    InvertedIndex index;
};

Fixture random_fixture(std::uint64_t seed, std::size_t count)
{
    std::mt19937_64 rng(seed);
    Fixture f;
    std::vector<InvertedIndex::Document> documents;
    for (std::size_t i = 0; i < count; ++i) {
        char id[16];
        std::snprintf(id, sizeof id, "d%03zu_0", i);
        f.docs.push_back({id, fixture::random_text(rng, 40, 30)});
        documents.push_back({id, f.docs.back().text});
    }
    f.index = InvertedIndex::build(documents);
    return f;
}

Claim claim_for(std::string id, std::string text, std::string source, Label label = Label::supports)
{
    Claim c;
    c.claim_id = std::move(id);
    c.text = std::move(text);
    c.source_para_id = std::move(source);
    c.label = label;
    return c;
}

}  // namespace

TEST_CASE("negatives are the top lexical hits minus the positive")
{
    const auto f = random_fixture(5, 40);
    std::mt19937_64 rng(11);
    std::vector<Claim> claims;
    for (std::size_t i = 0; i < 20; ++i) {
        claims.push_back(claim_for("c" + std::to_string(i), fixture::random_text(rng, 6, 30),
                                   f.docs[i * 2].id));
    }
    TupleOptions options;
    options.n = 8;
    const auto result = build_tuples(claims, f.index, options);
    CHECK(result.errors.empty());
    REQUIRE(result.tuples.size() == claims.size());
    for (std::size_t i = 0; i < claims.size(); ++i) {
        const auto &t = result.tuples[i];
        CHECK(t.claim_id == claims[i].claim_id);
        CHECK(t.positive == claims[i].source_para_id);
        const auto ranked = oracle::bm25_rank(f.docs, claims[i].text, options.params);
        std::vector<std::string> expected;
        for (std::size_t r = 0; r < ranked.size() && r < options.n; ++r) {
            if (ranked[r].first != t.positive) {
                expected.push_back(ranked[r].first);
            }
        }
        expected.resize(std::min(expected.size(), options.n - 1));
        CHECK(t.negatives == expected);
        CHECK(t.is_short == (expected.size() < options.n - 1));
        CHECK(std::find(t.negatives.begin(), t.negatives.end(), t.positive) == t.negatives.end());
    }
}

TEST_CASE("NEI claims and repeated texts produce no tuples")
{
    const auto f = random_fixture(6, 40);
    std::vector<Claim> claims{claim_for("a", "w1 w2", "d000_0", Label::nei),
                              claim_for("b", "w1 w3", "d001_0", Label::nei)};
    CHECK(build_tuples(claims, f.index).tuples.empty());

    claims = {claim_for("a", "w1 w2", "d000_0"), claim_for("b", "w1 w2", "d001_0", Label::refutes),
              claim_for("c", "w3", "d002_0", Label::refutes)};
    const auto result = build_tuples(claims, f.index);
    REQUIRE(result.tuples.size() == 2);
    CHECK(result.tuples[0].claim_id == "a");
    CHECK(result.tuples[1].claim_id == "c");
}

TEST_CASE("small indexes yield short tuples and unindexed sources are reported")
{
    const auto index = InvertedIndex::build({{"a_0", "red fox"}, {"b_0", "red hen"}, {"c_0", "blue sky"}});
    std::vector<Claim> claims{claim_for("x", "red fox", "a_0"), claim_for("y", "red", "zz_0")};
    TupleOptions options;
    options.n = 32;
    const auto result = build_tuples(claims, index, options);
    REQUIRE(result.tuples.size() == 1);
    CHECK(result.tuples[0].negatives == std::vector<std::string>{"b_0"});
    CHECK(result.tuples[0].is_short);
    REQUIRE(result.errors.size() == 1);
    CHECK(result.errors[0].claim_id == "y");

    options.n = 1;
    CHECK_THROWS_AS((void)build_tuples(claims, index, options), PreconditionError);
}

TEST_CASE("thread count does not change the output")
{
    const auto f = random_fixture(9, 40);
    std::mt19937_64 rng(3);
    std::vector<Claim> claims;
    for (std::size_t i = 0; i < 60; ++i) {
        claims.push_back(claim_for("c" + std::to_string(i), fixture::random_text(rng, 5, 30),
                                   f.docs[i % 40].id));
    }
    TupleOptions options;
    const auto one = build_tuples(claims, f.index, options);
    options.threads = 6;
    const auto many = build_tuples(claims, f.index, options);
    REQUIRE(one.tuples.size() == many.tuples.size());
    for (std::size_t i = 0; i < one.tuples.size(); ++i) {
        CHECK(to_json(one.tuples[i]) == to_json(many.tuples[i]));
    }
}

TEST_CASE("tuples serialize as JSONL")
{
    fixture::TempDir dir;
    const NwayTuple t{"id", "claim", "p_0", {"q_0", "r_1"}, false};
    const json doc = to_json(t);
    CHECK(doc == json{{"claim_id", "id"}, {"claim", "claim"}, {"positive", "p_0"},
                      {"negatives", {"q_0", "r_1"}}});
    save_tuples(dir / "t.jsonl", std::vector<NwayTuple>{t, t});
    const auto text = fixture::read_file(dir / "t.jsonl");
    CHECK(text == doc.dump() + "\n" + doc.dump() + "\n");
}
