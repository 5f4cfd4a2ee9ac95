#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "factcheck/corpus.hpp"
#include "factcheck/jsonl.hpp"
#include "factcheck/lexical_index.hpp"
#include "factcheck/model_gateway.hpp"

namespace factcheck {

enum class RetrievalMode { lexical, dense, dense_ans, dense_nli };

[[nodiscard]] std::string_view to_string(RetrievalMode mode);
[[nodiscard]] RetrievalMode parse_retrieval_mode(std::string_view text);

struct RetrievalConfig {
    RetrievalMode mode = RetrievalMode::lexical;
    std::size_t k = 20;
    std::size_t ans_k = 15;  // lexical depth that dense results must appear in
    std::size_t nli_k2 = 3;  // results kept after NLI reranking
    Bm25Params bm25 = Bm25Params::full_text();

    void validate() const;
    [[nodiscard]] json to_json() const;
};

/// Dense results whose ids also occur in `lexical_topk`, in dense order.
[[nodiscard]] std::vector<RankedEvidence> ans_filter(std::span<const RankedEvidence> dense_results,
                                                     std::span<const RankedEvidence> lexical_topk);

/// Rescores each result by max(SUPPORTS, REFUTES) raw NLI logit against its
/// paragraph text and keeps the best `k2`; equal scores keep their prior
/// order. Documents whose scoring fails are dropped.
[[nodiscard]] std::vector<RankedEvidence> nli_rerank(std::string_view claim,
                                                     std::span<const RankedEvidence> dense_results,
                                                     const Corpus &corpus, const ModelGateway &gw,
                                                     std::size_t k2);

[[nodiscard]] std::vector<RankedEvidence> retrieve(std::string_view claim,
                                                   const RetrievalConfig &config,
                                                   const InvertedIndex &index, const Corpus &corpus,
                                                   const ModelGateway &gw);

[[nodiscard]] json to_json(const RankedEvidence &evidence);
[[nodiscard]] RankedEvidence ranked_evidence_from_json(const json &record);

}  // namespace factcheck
