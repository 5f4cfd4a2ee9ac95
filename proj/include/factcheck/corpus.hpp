#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace factcheck {

struct RawPage {
    std::string page_id;
    std::string title;
    std::string body;  // plain text, '\n' separates source paragraphs
};

/// One retrievable evidence unit: the page title, a newline, then one or more
/// merged source paragraphs.
struct Paragraph {
    std::string para_id;
    std::string page_id;
    std::string page_title;
    std::size_t ordinal = 0;
    std::string text;
    std::size_t char_len = 0;  // code points of `text`

    /// `text` without the title prefix.
    [[nodiscard]] std::string_view body() const;
};

inline constexpr std::string_view title_separator = "\n";

/// Ordered regex rewrite rules applied to page bodies. Rules are data so that
/// language-specific residue can be handled without code changes.
class Cleaner {
   public:
    struct Rule {
        std::string pattern;
        std::string replacement;
        bool case_insensitive = false;
    };

    explicit Cleaner(std::vector<Rule> rules);

    /// Script/style blocks, HTML comments and residual tags.
    [[nodiscard]] static Cleaner defaults();
    /// {"rules": [{"pattern": "...", "replace": "...", "icase": bool}, ...]}
    [[nodiscard]] static Cleaner from_file(const std::filesystem::path &path);

    [[nodiscard]] std::string clean_text(std::string_view body) const;
    [[nodiscard]] const std::vector<Rule> &rules() const noexcept { return rules_; }

   private:
    struct Compiled;
    std::vector<Rule> rules_;
    std::shared_ptr<const Compiled> compiled_;
};

[[nodiscard]] RawPage clean_page(const RawPage &raw, const Cleaner &cleaner = Cleaner::defaults());

struct ChunkingOptions {
    std::size_t merge_threshold = 1000;  // code points
    std::size_t min_len = 70;            // code points, measured with the title prefix
};

/// Greedy merge of the '\n'-separated source paragraphs of `body`: pieces
/// are appended (joined by '\n') until the chunk length exceeds the
/// threshold, then the chunk is closed. Joining the result with '\n'
/// reproduces `body` exactly. No title, no length filter.
[[nodiscard]] std::vector<std::string> merge_source_paragraphs(std::string_view body,
                                                               std::size_t merge_threshold);

/// Title-prefixed chunks of a cleaned page, dropping those below min_len.
[[nodiscard]] std::vector<Paragraph> chunk_page(const RawPage &page,
                                                const ChunkingOptions &options = {});

[[nodiscard]] std::string make_para_id(std::string_view page_id, std::size_t ordinal);

/// Immutable paragraph collection with lookup by para_id and by page.
class Corpus {
   public:
    Corpus() = default;
    /// Validates identity invariants; throws FormatError on duplicates.
    Corpus(std::string corpus_id, std::string language, std::vector<Paragraph> paragraphs);

    [[nodiscard]] const std::string &corpus_id() const noexcept { return corpus_id_; }
    [[nodiscard]] const std::string &language() const noexcept { return language_; }
    [[nodiscard]] const std::vector<Paragraph> &paragraphs() const noexcept { return paragraphs_; }
    [[nodiscard]] std::size_t size() const noexcept { return paragraphs_.size(); }
    [[nodiscard]] bool empty() const noexcept { return paragraphs_.empty(); }

    [[nodiscard]] const Paragraph *find(std::string_view para_id) const;
    [[nodiscard]] bool has_page(std::string_view page_id) const;
    /// Paragraphs of a page in ordinal order; empty for unknown pages.
    [[nodiscard]] std::vector<const Paragraph *> page(std::string_view page_id) const;
    [[nodiscard]] std::size_t page_count() const noexcept { return page_index_.size(); }

    void save_jsonl(const std::filesystem::path &path) const;
    [[nodiscard]] static Corpus load_jsonl(const std::filesystem::path &path,
                                           std::string corpus_id = {}, std::string language = {});

   private:
    std::string corpus_id_;
    std::string language_;
    std::vector<Paragraph> paragraphs_;
    std::map<std::string, std::size_t, std::less<>> by_id_;
    std::map<std::string, std::vector<std::size_t>, std::less<>> page_index_;
};

struct CorpusOptions {
    std::string corpus_id;
    std::string language;
    ChunkingOptions chunking;
    /// Remove the D most frequent duplicated paragraph bodies corpus-wide.
    std::size_t drop_top_duplicates = 0;
};

/// Pages must already be cleaned. Pages repeating an earlier title are skipped.
[[nodiscard]] Corpus build_corpus(std::span<const RawPage> pages, const CorpusOptions &options);

/// Reads extracted pages ({"id","title","text"} per line) from a file or
/// from every regular file under a directory, in path order.
[[nodiscard]] std::vector<RawPage> read_dump(const std::filesystem::path &dump);

}  // namespace factcheck
