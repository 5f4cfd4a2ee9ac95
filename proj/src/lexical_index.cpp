#include "factcheck/lexical_index.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "factcheck/corpus.hpp"
#include "factcheck/error.hpp"
#include "factcheck/jsonl.hpp"
#include "factcheck/text.hpp"

namespace factcheck {

void Bm25Params::validate() const
{
    if (!(k1 >= 0.0) || !std::isfinite(k1)) {
        throw PreconditionError("BM-25 k1 must be non-negative");
    }
    if (!(b >= 0.0 && b <= 1.0)) {
        throw PreconditionError("BM-25 b must lie in [0, 1]");
    }
}

std::string_view to_string(Stage stage)
{
    switch (stage) {
    case Stage::lexical:
        return "lexical";
    case Stage::dense:
        return "dense";
    case Stage::ans_filtered:
        return "ans_filtered";
    case Stage::nli_reranked:
        return "nli_reranked";
    }
    return "?";
}

Stage parse_stage(std::string_view text)
{
    for (Stage s : {Stage::lexical, Stage::dense, Stage::ans_filtered, Stage::nli_reranked}) {
        if (to_string(s) == text) {
            return s;
        }
    }
    throw FormatError("unknown retrieval stage '" + std::string(text) + "'");
}

std::vector<std::string> tokenize(std::string_view text)
{
    std::vector<std::string> tokens;
    for (auto &word : text::segment_words(text)) {
        tokens.push_back(text::to_lower(word.text));
    }
    return tokens;
}

double bm25_idf(std::size_t doc_count, std::size_t df) noexcept
{
    const auto n = static_cast<double>(doc_count);
    const auto d = static_cast<double>(df);
    return std::log(1.0 + (n - d + 0.5) / (d + 0.5));
}

InvertedIndex InvertedIndex::build(std::vector<Document> documents)
{
    std::sort(documents.begin(), documents.end(),
              [](const Document &a, const Document &b) { return a.para_id < b.para_id; });
    for (std::size_t i = 1; i < documents.size(); ++i) {
        if (documents[i - 1].para_id == documents[i].para_id) {
            throw FormatError("duplicate para_id '" + documents[i].para_id + "'");
        }
    }

    InvertedIndex index;
    index.para_ids_.reserve(documents.size());
    index.doc_lengths_.reserve(documents.size());
    std::unordered_map<std::string, std::uint32_t> tf;
    for (std::size_t doc = 0; doc < documents.size(); ++doc) {
        tf.clear();
        const auto tokens = tokenize(documents[doc].text);
        for (const auto &token : tokens) {
            ++tf[token];
        }
        // Documents are visited in ascending order, so postings stay sorted.
        for (auto &[term, count] : tf) {
            index.postings_[term].push_back(Posting{static_cast<std::uint32_t>(doc), count});
        }
        index.para_ids_.push_back(std::move(documents[doc].para_id));
        index.doc_lengths_.push_back(static_cast<std::uint32_t>(tokens.size()));
    }
    index.finalize_statistics();
    return index;
}

void InvertedIndex::finalize_statistics()
{
    if (doc_lengths_.empty()) {
        avg_doc_length_ = 0.0;
        return;
    }
    const double total = std::accumulate(doc_lengths_.begin(), doc_lengths_.end(), 0.0);
    avg_doc_length_ = total / static_cast<double>(doc_lengths_.size());
}

std::optional<std::size_t> InvertedIndex::doc_number(std::string_view para_id) const
{
    auto it = std::lower_bound(para_ids_.begin(), para_ids_.end(), para_id,
                               [](const std::string &a, std::string_view b) { return a < b; });
    if (it == para_ids_.end() || *it != para_id) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - para_ids_.begin());
}

std::span<const Posting> InvertedIndex::postings(const std::string &term) const
{
    auto it = postings_.find(term);
    if (it == postings_.end()) {
        return {};
    }
    return it->second;
}

std::vector<std::string> InvertedIndex::terms() const
{
    std::vector<std::string> out;
    out.reserve(postings_.size());
    for (const auto &entry : postings_) {
        out.push_back(entry.first);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<RankedEvidence> InvertedIndex::search(std::string_view query, std::size_t k,
                                                  const Bm25Params &params) const
{
    if (k == 0) {
        throw PreconditionError("search: k must be at least 1");
    }
    params.validate();
    if (para_ids_.empty()) {
        return {};
    }

    std::vector<std::string> terms;
    for (auto &token : tokenize(query)) {
        if (std::find(terms.begin(), terms.end(), token) == terms.end()) {
            terms.push_back(std::move(token));
        }
    }

    std::vector<double> scores(para_ids_.size(), 0.0);
    std::vector<std::uint32_t> matched;
    std::vector<bool> seen(para_ids_.size(), false);
    for (const auto &term : terms) {
        const auto list = postings(term);
        if (list.empty()) {
            continue;
        }
        const double idf = bm25_idf(para_ids_.size(), list.size());
        for (const auto &posting : list) {
            const double f = posting.tf;
            const double norm = params.k1 * (1.0 - params.b +
                                             params.b * doc_lengths_[posting.doc] / avg_doc_length_);
            scores[posting.doc] += f * (params.k1 + 1.0) / (f + norm) * idf;
            if (!seen[posting.doc]) {
                seen[posting.doc] = true;
                matched.push_back(posting.doc);
            }
        }
    }

    auto better = [&scores](std::uint32_t a, std::uint32_t b) {
        return scores[a] != scores[b] ? scores[a] > scores[b] : a < b;
    };
    const std::size_t m = std::min(k, matched.size());
    std::partial_sort(matched.begin(), matched.begin() + static_cast<std::ptrdiff_t>(m),
                      matched.end(), better);

    std::vector<RankedEvidence> out;
    out.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        out.push_back(RankedEvidence{para_ids_[matched[i]], scores[matched[i]], i + 1,
                                     Stage::lexical});
    }
    return out;
}

void InvertedIndex::save(const std::filesystem::path &dir) const
{
    std::filesystem::create_directories(dir);
    JsonlWriter out(dir / "index.jsonl");
    out.write(json{{"format", index_format_name},
                   {"version", index_format_version},
                   {"doc_count", para_ids_.size()},
                   {"term_count", postings_.size()},
                   {"avg_doc_length", avg_doc_length_}});
    for (std::size_t doc = 0; doc < para_ids_.size(); ++doc) {
        out.write(json{{"d", para_ids_[doc]}, {"len", doc_lengths_[doc]}});
    }
    for (const auto &term : terms()) {
        json flat = json::array();
        for (const auto &p : postings_.at(term)) {
            flat.push_back(p.doc);
            flat.push_back(p.tf);
        }
        out.write(json{{"t", term}, {"p", std::move(flat)}});
    }
    out.close();
}

InvertedIndex InvertedIndex::load(const std::filesystem::path &dir)
{
    const auto path = dir / "index.jsonl";
    InvertedIndex index;
    bool header_seen = false;
    std::size_t expected_docs = 0;
    read_jsonl(path, [&](const json &r, std::size_t line) {
        if (!header_seen) {
            if (r.value("format", std::string{}) != index_format_name) {
                throw FormatError(path.string() + ": not a BM-25 index file");
            }
            if (r.at("version").get<int>() != index_format_version) {
                throw FormatError(path.string() + ": unsupported index version " +
                                  r.at("version").dump());
            }
            expected_docs = r.at("doc_count").get<std::size_t>();
            header_seen = true;
            return;
        }
        if (r.contains("d")) {
            index.para_ids_.push_back(r.at("d").get<std::string>());
            index.doc_lengths_.push_back(r.at("len").get<std::uint32_t>());
            return;
        }
        const auto &flat = r.at("p");
        if (flat.size() % 2 != 0) {
            throw FormatError(path.string() + ":" + std::to_string(line) + ": odd posting array");
        }
        std::vector<Posting> list;
        list.reserve(flat.size() / 2);
        for (std::size_t i = 0; i < flat.size(); i += 2) {
            const auto doc = flat[i].get<std::uint32_t>();
            if (doc >= expected_docs) {
                throw FormatError(path.string() + ":" + std::to_string(line) +
                                  ": posting refers to unknown document");
            }
            list.push_back(Posting{doc, flat[i + 1].get<std::uint32_t>()});
        }
        index.postings_.emplace(r.at("t").get<std::string>(), std::move(list));
    });
    if (!header_seen || index.para_ids_.size() != expected_docs) {
        throw FormatError(path.string() + ": truncated index");
    }
    index.finalize_statistics();
    return index;
}

InvertedIndex build_index(const Corpus &corpus)
{
    std::vector<InvertedIndex::Document> docs;
    docs.reserve(corpus.size());
    for (const auto &p : corpus.paragraphs()) {
        docs.push_back({p.para_id, p.text});
    }
    return InvertedIndex::build(std::move(docs));
}

}  // namespace factcheck
