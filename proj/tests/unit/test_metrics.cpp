#include <doctest.h>

#include <fstream>
#include <random>

#include "factcheck/error.hpp"
#include "factcheck/metrics.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace factcheck;

namespace {

std::vector<RankedEvidence> results(std::initializer_list<std::string> ids)
{
    std::vector<RankedEvidence> out;
    for (const auto &id : ids) {
        out.push_back(RankedEvidence{id, 1.0, out.size() + 1, Stage::lexical});
    }
    return out;
}

}  // namespace

TEST_CASE("MRR and precision on a hand-scored list")
{
    const auto r = results({"x", "g1", "y", "g2"});
    const GoldEvidence gold{"c", {"g1", "g2"}};
    CHECK(mrr_at_k(r, gold, 1) == 0.0);
    CHECK(mrr_at_k(r, gold, 2) == 0.5);
    CHECK(mrr_at_k(r, gold, 20) == 0.5);
    CHECK(precision_at_k(r, gold, 1) == 0.0);
    CHECK(precision_at_k(r, gold, 2) == 0.5);
    CHECK(precision_at_k(r, gold, 4) == 0.5);
    CHECK(precision_at_k(r, gold, 10) == doctest::Approx(0.2));
    CHECK(mrr_at_k(results({"g2"}), gold, 1) == 1.0);
    CHECK(mrr_at_k({}, gold, 5) == 0.0);
    CHECK_THROWS_AS((void)mrr_at_k(r, GoldEvidence{"c", {}}, 1), PreconditionError);
    CHECK_THROWS_AS((void)precision_at_k(r, gold, 0), PreconditionError);
}

TEST_CASE("report means over every gold claim")
{
    ResultLists lists;
    lists["a"] = results({"g", "x"});
    lists["b"] = results({"x", "x2", "g"});
    lists["c"] = results({"x", "y"});
    const std::vector<GoldEvidence> gold{{"a", {"g"}}, {"b", {"g"}}, {"c", {"g"}}, {"d", {"g"}}};
    const std::vector<std::size_t> ks{1, 2, 5};
    const auto report = evaluate_retrieval(lists, gold, ks);
    CHECK(report.claims == 4);
    CHECK(report.mrr.at(1) == doctest::Approx(0.25));
    CHECK(report.mrr.at(5) == doctest::Approx((1.0 + 1.0 / 3.0) / 4.0));
    CHECK(report.precision.at(1) == doctest::Approx(0.25));
    CHECK(report.precision.at(5) == doctest::Approx((0.2 + 0.2) / 4.0));
    const json doc = report.to_json();
    CHECK(doc["claims"] == 4);
    CHECK(report.to_csv().rfind("metric,value\nMRR@1,0.25\n", 0) == 0);
    CHECK(report.to_csv().find("P@5,0.1\n") != std::string::npos);
}

TEST_CASE("macro F1 of a single-class predictor")
{
    const std::vector<Label> targets{Label::supports, Label::refutes, Label::nei,
                                     Label::supports, Label::refutes, Label::nei};
    const std::vector<Label> preds(targets.size(), Label::supports);
    CHECK(f1_macro(preds, targets) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    CHECK(f1_macro(targets, targets) == 1.0);
    const auto report = evaluate_classification(preds, targets);
    CHECK(report.accuracy == doctest::Approx(1.0 / 3.0));
    CHECK(report.confusion[1][0] == 2);
    CHECK(report.confusion[0][0] == 2);
    CHECK(report.per_class_f1[0] == doctest::Approx(0.5));
    CHECK_THROWS_AS((void)f1_macro(preds, std::vector<Label>{Label::nei}), PreconditionError);
}

TEST_CASE("F1 and the confusion matrix agree with the direct definitions")
{
    std::mt19937_64 rng(12);
    std::uniform_int_distribution<int> pick(0, 2);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + rng() % 40;
        std::vector<Label> preds;
        std::vector<Label> targets;
        for (std::size_t i = 0; i < n; ++i) {
            preds.push_back(all_labels[pick(rng)]);
            targets.push_back(all_labels[pick(rng)]);
        }
        CHECK(f1_macro(preds, targets) == doctest::Approx(oracle::f1_macro(preds, targets)).epsilon(1e-12));
        const auto cm = confusion_matrix(preds, targets);
        std::size_t total = 0;
        for (const auto &row : cm) {
            for (auto v : row) {
                total += v;
            }
        }
        CHECK(total == n);
        std::size_t diag = cm[0][0] + cm[1][1] + cm[2][2];
        std::size_t agree = 0;
        for (std::size_t i = 0; i < n; ++i) {
            agree += preds[i] == targets[i];
        }
        CHECK(diag == agree);

        // renaming the classes consistently leaves macro F1 unchanged
        const std::array<Label, 3> perm{Label::nei, Label::supports, Label::refutes};
        std::vector<Label> p2;
        std::vector<Label> t2;
        for (std::size_t i = 0; i < n; ++i) {
            p2.push_back(perm[index_of(preds[i])]);
            t2.push_back(perm[index_of(targets[i])]);
        }
        CHECK(f1_macro(p2, t2) == doctest::Approx(f1_macro(preds, targets)).epsilon(1e-12));
    }
}

TEST_CASE("gold and result files load")
{
    fixture::TempDir dir;
    {
        std::ofstream gold(dir / "gold.jsonl");
        gold << R"({"claim_id":"a","gold_ids":["p_0","q_1"]})" << "\n";
        std::ofstream res(dir / "res.jsonl");
        res << R"({"claim_id":"a","results":[{"para_id":"q_1","score":2.0,"rank":1,"stage":"dense"}]})" << "\n";
    }
    const auto gold = read_gold(dir / "gold.jsonl");
    REQUIRE(gold.size() == 1);
    CHECK(gold[0].gold_ids.size() == 2);
    const auto lists = read_result_lists(dir / "res.jsonl");
    REQUIRE(lists.at("a").size() == 1);
    CHECK(mrr_at_k(lists.at("a"), gold[0], 1) == 1.0);
}
