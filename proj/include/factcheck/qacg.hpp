#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "factcheck/corpus.hpp"
#include "factcheck/jsonl.hpp"
#include "factcheck/label.hpp"
#include "factcheck/model_gateway.hpp"

namespace factcheck {

enum class Split { train, dev, test };

inline constexpr std::array<Split, 3> all_splits{Split::train, Split::dev, Split::test};

[[nodiscard]] std::string_view to_string(Split split);
[[nodiscard]] Split parse_split(std::string_view text);

struct ClaimTrace {
    Entity answer_entity;
    std::optional<Entity> substituted_entity;  // REFUTES only
    std::string question;
    std::vector<std::string> aux_para_ids;     // NEI only
};

struct Claim {
    std::string claim_id;
    std::string text;
    Label label = Label::supports;
    std::string language;
    std::string source_para_id;
    ClaimTrace trace;
};

/// Throws FormatError when the label-specific trace invariants do not hold.
void validate_claim(const Claim &claim);

[[nodiscard]] json to_json(const Claim &claim);
[[nodiscard]] Claim claim_from_json(const json &record);

using LabelCounts = std::array<std::size_t, label_count>;

struct ClaimDataset {
    std::string name;
    std::map<Split, std::vector<Claim>> splits;

    [[nodiscard]] LabelCounts label_counts(Split split) const;
    [[nodiscard]] std::size_t size() const;
    [[nodiscard]] std::size_t size(Split split) const;

    /// One claim per line, each carrying its "split".
    void save_jsonl(const std::filesystem::path &path) const;
    [[nodiscard]] static ClaimDataset load_jsonl(const std::filesystem::path &path,
                                                 std::string name = {});
};

/// Claim ids whose source paragraph is missing from `corpus`.
[[nodiscard]] std::vector<std::string> unresolved_sources(const ClaimDataset &dataset,
                                                          const Corpus &corpus);

// ---- generation -------------------------------------------------------------

struct SampledParagraph {
    Split split;
    const Paragraph *paragraph;
};

/// Uniform sampling without replacement; the first n_train draws go to
/// train, the next n_dev to dev, the rest to test.
[[nodiscard]] std::vector<SampledParagraph> sample_source_paragraphs(const Corpus &corpus,
                                                                     std::size_t n_train,
                                                                     std::size_t n_dev,
                                                                     std::size_t n_test,
                                                                     std::uint64_t seed);

/// A per-item generation failure. Failures skip the item, never the run.
struct GenerationIssue {
    std::string para_id;
    std::string stage;   // "ner", "supports", "refutes", "nei"
    std::string entity;  // empty for paragraph-level failures
    std::string message;
};

using GenerationLog = std::vector<GenerationIssue>;

/// One SUPPORTS claim per entity of `entities` (the NER output for p).
[[nodiscard]] std::vector<Claim> gen_supports(const Paragraph &p, std::span<const Entity> entities,
                                              const ModelGateway &gw, std::string_view language,
                                              GenerationLog &log);
/// Runs NER itself.
[[nodiscard]] std::vector<Claim> gen_supports(const Paragraph &p, const ModelGateway &gw,
                                              std::string_view language, GenerationLog &log);

/// For each SUPPORTS trace, re-generates the claim with a different entity of
/// the same type drawn uniformly from `entities`; no claim if none exists.
[[nodiscard]] std::vector<Claim> gen_refutes(const Paragraph &p, std::span<const Claim> supports,
                                             std::span<const Entity> entities,
                                             const ModelGateway &gw, std::uint64_t seed,
                                             GenerationLog &log);

/// Claims answered by entities of up to `aux_count` other paragraphs of the
/// same page that do not occur in `entities`; context is the source and the
/// auxiliary paragraph in page order.
[[nodiscard]] std::vector<Claim> gen_nei(const Paragraph &p, std::span<const Entity> entities,
                                         const Corpus &corpus, const ModelGateway &gw,
                                         std::size_t aux_count, std::uint64_t seed,
                                         GenerationLog &log);

struct ParagraphClaims {
    std::vector<Claim> supports;
    std::vector<Claim> refutes;
    std::vector<Claim> nei;
};

/// NER once, then all three procedures.
[[nodiscard]] ParagraphClaims generate_for_paragraph(const Paragraph &p, const Corpus &corpus,
                                                     const ModelGateway &gw,
                                                     std::size_t aux_count, std::uint64_t seed,
                                                     GenerationLog &log);

struct GenerateOptions {
    std::string name = "qacg";
    std::size_t n_train = 10000;
    std::size_t n_dev = 1000;
    std::size_t n_test = 1000;
    std::uint64_t seed = 0;
    std::size_t aux_count = 2;
    std::size_t threads = 1;
};

struct GenerationResult {
    ClaimDataset dataset;
    GenerationLog log;
};

/// Samples source paragraphs and generates raw claims. Output does not
/// depend on `threads`.
[[nodiscard]] GenerationResult generate_dataset(const Corpus &corpus, const ModelGateway &gw,
                                                const GenerateOptions &options);

// ---- dataset assembly -------------------------------------------------------

/// Exact-text duplicates removed, first occurrence kept.
[[nodiscard]] std::vector<Claim> dedup_claims(std::span<const Claim> claims);
/// Dedup across the whole dataset (train, then dev, then test).
[[nodiscard]] ClaimDataset dedup_dataset(const ClaimDataset &dataset);

/// Per split, every label downsampled uniformly to the minority-label count.
[[nodiscard]] ClaimDataset stratify_balance(const ClaimDataset &dataset, std::uint64_t seed);

/// Concatenation; claim ids become "<dataset name>:<claim id>".
[[nodiscard]] ClaimDataset build_sum(std::span<const ClaimDataset> datasets);

/// Uniform sample of the pooled datasets matching the first dataset's
/// per-split, per-label counts; ids namespaced as in build_sum.
[[nodiscard]] ClaimDataset build_mix(std::span<const ClaimDataset> datasets, std::uint64_t seed);

}  // namespace factcheck
