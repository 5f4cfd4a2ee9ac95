#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace factcheck {

class Corpus;

struct Bm25Params {
    double k1 = 0.9;
    double b = 0.9;

    /// k1 = 0.6, b = 0.5; used for the FEVER abstract corpus.
    [[nodiscard]] static constexpr Bm25Params fever() noexcept { return {0.6, 0.5}; }
    /// k1 = 0.9, b = 0.9; used for the full-text corpora.
    [[nodiscard]] static constexpr Bm25Params full_text() noexcept { return {0.9, 0.9}; }

    /// Throws PreconditionError unless k1 >= 0 and 0 <= b <= 1.
    void validate() const;
};

enum class Stage { lexical, dense, ans_filtered, nli_reranked };

[[nodiscard]] std::string_view to_string(Stage stage);
[[nodiscard]] Stage parse_stage(std::string_view text);

struct RankedEvidence {
    std::string para_id;
    double score = 0.0;
    std::size_t rank = 0;  // 1-based
    Stage stage = Stage::lexical;

    friend bool operator==(const RankedEvidence &, const RankedEvidence &) = default;
};

/// Lowercased Unicode words, no stemming, no stopwords.
[[nodiscard]] std::vector<std::string> tokenize(std::string_view text);

/// ln(1 + (N - df + 0.5) / (df + 0.5)); positive for every df <= N.
[[nodiscard]] double bm25_idf(std::size_t doc_count, std::size_t df) noexcept;

struct Posting {
    std::uint32_t doc;  // document number; numbering follows ascending para_id
    std::uint32_t tf;
};

/// Immutable BM-25 inverted index. Documents are numbered in ascending
/// para_id order, so posting order and the score tie-break both follow para_id.
class InvertedIndex {
   public:
    struct Document {
        std::string para_id;
        std::string text;
    };

    InvertedIndex() = default;

    [[nodiscard]] static InvertedIndex build(std::vector<Document> documents);

    [[nodiscard]] std::size_t doc_count() const noexcept { return para_ids_.size(); }
    [[nodiscard]] double avg_doc_length() const noexcept { return avg_doc_length_; }
    [[nodiscard]] std::size_t term_count() const noexcept { return postings_.size(); }
    [[nodiscard]] std::uint32_t doc_length(std::size_t doc) const { return doc_lengths_.at(doc); }
    [[nodiscard]] const std::string &para_id(std::size_t doc) const { return para_ids_.at(doc); }
    [[nodiscard]] std::optional<std::size_t> doc_number(std::string_view para_id) const;
    [[nodiscard]] bool contains(std::string_view para_id) const
    {
        return doc_number(para_id).has_value();
    }

    [[nodiscard]] std::span<const Posting> postings(const std::string &term) const;
    [[nodiscard]] std::size_t df(const std::string &term) const { return postings(term).size(); }
    [[nodiscard]] std::vector<std::string> terms() const;

    /// Top-k by BM-25 over the distinct query terms; ties by ascending para_id.
    [[nodiscard]] std::vector<RankedEvidence> search(std::string_view query, std::size_t k,
                                                     const Bm25Params &params) const;

    /// Writes `dir/index.jsonl` (format in docs/index_format.md).
    void save(const std::filesystem::path &dir) const;
    [[nodiscard]] static InvertedIndex load(const std::filesystem::path &dir);

   private:
    std::vector<std::string> para_ids_;
    std::vector<std::uint32_t> doc_lengths_;
    double avg_doc_length_ = 0.0;
    std::unordered_map<std::string, std::vector<Posting>> postings_;

    void finalize_statistics();
};

[[nodiscard]] InvertedIndex build_index(const Corpus &corpus);

inline constexpr std::string_view index_format_name = "factcheck-bm25-index";
inline constexpr int index_format_version = 1;

}  // namespace factcheck
