#include "factcheck/retrieval.hpp"

#include <algorithm>
#include <set>

#include "factcheck/error.hpp"
#include "factcheck/label.hpp"
#include "factcheck/log.hpp"

namespace factcheck {

std::string_view to_string(RetrievalMode mode)
{
    switch (mode) {
    case RetrievalMode::lexical:
        return "lexical";
    case RetrievalMode::dense:
        return "dense";
    case RetrievalMode::dense_ans:
        return "dense_ans";
    case RetrievalMode::dense_nli:
        return "dense_nli";
    }
    return "?";
}

RetrievalMode parse_retrieval_mode(std::string_view text)
{
    for (auto mode : {RetrievalMode::lexical, RetrievalMode::dense, RetrievalMode::dense_ans,
                      RetrievalMode::dense_nli}) {
        if (to_string(mode) == text) {
            return mode;
        }
    }
    throw FormatError("unknown retrieval mode '" + std::string(text) + "'");
}

void RetrievalConfig::validate() const
{
    if (k == 0 || ans_k == 0 || nli_k2 == 0) {
        throw PreconditionError("k, ans_k and nli_k2 must all be at least 1");
    }
    bm25.validate();
}

json RetrievalConfig::to_json() const
{
    return json{{"mode", to_string(mode)},
                {"k", k},
                {"ans_k", ans_k},
                {"nli_k2", nli_k2},
                {"bm25", {{"k1", bm25.k1}, {"b", bm25.b}}}};
}

namespace {

void renumber(std::vector<RankedEvidence> &results, Stage stage)
{
    for (std::size_t i = 0; i < results.size(); ++i) {
        results[i].rank = i + 1;
        results[i].stage = stage;
    }
}

}  // namespace

std::vector<RankedEvidence> ans_filter(std::span<const RankedEvidence> dense_results,
                                       std::span<const RankedEvidence> lexical_topk)
{
    std::set<std::string_view> allowed;
    for (const auto &r : lexical_topk) {
        allowed.insert(r.para_id);
    }
    std::vector<RankedEvidence> out;
    for (const auto &r : dense_results) {
        if (allowed.contains(r.para_id)) {
            out.push_back(r);
        }
    }
    renumber(out, Stage::ans_filtered);
    return out;
}

std::vector<RankedEvidence> nli_rerank(std::string_view claim,
                                       std::span<const RankedEvidence> dense_results,
                                       const Corpus &corpus, const ModelGateway &gw,
                                       std::size_t k2)
{
    if (k2 == 0) {
        throw PreconditionError("nli_k2 must be at least 1");
    }
    std::vector<RankedEvidence> scored;
    for (const auto &r : dense_results) {
        const Paragraph *p = corpus.find(r.para_id);
        if (p == nullptr) {
            log::warn("reranking dropped '" + r.para_id + "': not in the corpus");
            continue;
        }
        try {
            const auto logits = gw.nli(claim, p->text);
            RankedEvidence rescored = r;
            rescored.score = std::max(logits.values[index_of(Label::supports)],
                                      logits.values[index_of(Label::refutes)]);
            scored.push_back(std::move(rescored));
        } catch (const Error &e) {
            log::warn("reranking dropped '" + r.para_id + "': " + e.what());
        }
    }
    std::stable_sort(scored.begin(), scored.end(),
                     [](const auto &a, const auto &b) { return a.score > b.score; });
    if (scored.size() > k2) {
        scored.resize(k2);
    }
    renumber(scored, Stage::nli_reranked);
    return scored;
}

std::vector<RankedEvidence> retrieve(std::string_view claim, const RetrievalConfig &config,
                                     const InvertedIndex &index, const Corpus &corpus,
                                     const ModelGateway &gw)
{
    config.validate();
    try {
        switch (config.mode) {
        case RetrievalMode::lexical: {
            auto out = index.search(claim, config.k, config.bm25);
            renumber(out, Stage::lexical);
            return out;
        }
        case RetrievalMode::dense:
            return gw.dense_search(claim, config.k);
        case RetrievalMode::dense_ans: {
            const auto dense = gw.dense_search(claim, config.k);
            const auto lexical = index.search(claim, config.ans_k, config.bm25);
            return ans_filter(dense, lexical);
        }
        case RetrievalMode::dense_nli: {
            const auto dense = gw.dense_search(claim, config.k);
            return nli_rerank(claim, dense, corpus, gw, config.nli_k2);
        }
        }
    } catch (const TransportError &e) {
        throw TransportError(e.role(), std::string(to_string(config.mode)) + " retrieval: " +
                                           e.detail());
    }
    return {};
}

json to_json(const RankedEvidence &evidence)
{
    return json{{"para_id", evidence.para_id},
                {"score", evidence.score},
                {"rank", evidence.rank},
                {"stage", to_string(evidence.stage)}};
}

RankedEvidence ranked_evidence_from_json(const json &record)
{
    RankedEvidence r;
    r.para_id = record.at("para_id").get<std::string>();
    r.score = record.value("score", 0.0);
    r.rank = record.at("rank").get<std::size_t>();
    r.stage = parse_stage(record.value("stage", std::string("lexical")));
    return r;
}

}  // namespace factcheck
