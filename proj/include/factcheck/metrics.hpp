#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "factcheck/jsonl.hpp"
#include "factcheck/label.hpp"
#include "factcheck/lexical_index.hpp"

namespace factcheck {

/// Union of all annotated evidence paragraphs for one claim.
struct GoldEvidence {
    std::string claim_id;
    std::set<std::string, std::less<>> gold_ids;
};

/// 1 / rank of the first gold hit at rank <= k, else 0.
[[nodiscard]] double mrr_at_k(std::span<const RankedEvidence> results, const GoldEvidence &gold,
                              std::size_t k);

/// Gold hits among ranks 1..k, divided by k.
[[nodiscard]] double precision_at_k(std::span<const RankedEvidence> results,
                                    const GoldEvidence &gold, std::size_t k);

using ConfusionMatrix = std::array<std::array<std::size_t, label_count>, label_count>;  // [target][pred]

[[nodiscard]] ConfusionMatrix confusion_matrix(std::span<const Label> preds,
                                               std::span<const Label> targets);

/// Unweighted mean of the per-class F1 scores; a class with no true
/// positives (including one absent everywhere) scores 0.
[[nodiscard]] double f1_macro(std::span<const Label> preds, std::span<const Label> targets);

using ResultLists = std::map<std::string, std::vector<RankedEvidence>, std::less<>>;

struct RetrievalReport {
    std::size_t claims = 0;
    std::map<std::size_t, double> mrr;        // k -> mean MRR@k
    std::map<std::size_t, double> precision;  // k -> mean P@k

    [[nodiscard]] json to_json() const;
    [[nodiscard]] std::string to_csv() const;
};

/// Means over every gold claim; a claim with no result list scores 0.
[[nodiscard]] RetrievalReport evaluate_retrieval(const ResultLists &results,
                                                 std::span<const GoldEvidence> gold,
                                                 std::span<const std::size_t> ks);

struct ClassificationReport {
    std::size_t n = 0;
    double f1_macro = 0.0;
    double accuracy = 0.0;
    std::array<double, label_count> per_class_f1{};
    ConfusionMatrix confusion{};

    [[nodiscard]] json to_json() const;
    [[nodiscard]] std::string to_csv() const;
};

[[nodiscard]] ClassificationReport evaluate_classification(std::span<const Label> preds,
                                                           std::span<const Label> targets);

/// {"claim_id": "...", "gold_ids": [...]} per line.
[[nodiscard]] std::vector<GoldEvidence> read_gold(const std::filesystem::path &path);
/// {"claim_id": "...", "results": [{"para_id", "score", "rank", "stage"}, ...]} per line.
[[nodiscard]] ResultLists read_result_lists(const std::filesystem::path &path);

}  // namespace factcheck
