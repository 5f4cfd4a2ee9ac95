#include "factcheck/corpus.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include <unicode/regex.h>
#include <unicode/unistr.h>

#include "factcheck/error.hpp"
#include "factcheck/jsonl.hpp"
#include "factcheck/text.hpp"

namespace factcheck {

std::string_view Paragraph::body() const
{
    const std::size_t prefix = page_title.size() + title_separator.size();
    if (text.size() < prefix) {
        return {};
    }
    return std::string_view(text).substr(prefix);
}

// ---- cleaning ---------------------------------------------------------------

struct Cleaner::Compiled {
    std::vector<std::unique_ptr<icu::RegexPattern>> patterns;
    std::vector<icu::UnicodeString> replacements;
};

Cleaner::Cleaner(std::vector<Rule> rules) : rules_(std::move(rules))
{
    auto compiled = std::make_shared<Compiled>();
    for (const auto &rule : rules_) {
        UErrorCode status = U_ZERO_ERROR;
        UParseError parse_error{};
        const uint32_t flags = rule.case_insensitive ? static_cast<uint32_t>(UREGEX_CASE_INSENSITIVE) : 0U;
        std::unique_ptr<icu::RegexPattern> pattern(icu::RegexPattern::compile(
            icu::UnicodeString::fromUTF8(rule.pattern), flags, parse_error, status));
        if (U_FAILURE(status)) {
            throw FormatError("bad cleaning pattern '" + rule.pattern + "': " + u_errorName(status));
        }
        compiled->patterns.push_back(std::move(pattern));
        compiled->replacements.push_back(icu::UnicodeString::fromUTF8(rule.replacement));
    }
    compiled_ = std::move(compiled);
}

Cleaner Cleaner::defaults()
{
    static const Cleaner cleaner(std::vector<Rule>{
        {R"(<script\b[^>]*>[\s\S]*?</script\s*>)", "", true},
        {R"(<style\b[^>]*>[\s\S]*?</style\s*>)", "", true},
        {R"(<!--[\s\S]*?-->)", "", false},
        {R"(</?[A-Za-z][A-Za-z0-9]*(?:\s[^<>\n]*)?/?>)", "", false},
    });
    return cleaner;
}

Cleaner Cleaner::from_file(const std::filesystem::path &path)
{
    const json doc = read_json_file(path);
    std::vector<Rule> rules;
    try {
        for (const auto &r : doc.at("rules")) {
            rules.push_back(Rule{r.at("pattern").get<std::string>(),
                                 r.value("replace", std::string{}), r.value("icase", false)});
        }
    } catch (const json::exception &e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    return Cleaner(std::move(rules));
}

std::string Cleaner::clean_text(std::string_view body) const
{
    icu::UnicodeString current = icu::UnicodeString::fromUTF8(
        icu::StringPiece(body.data(), static_cast<int32_t>(body.size())));
    for (std::size_t i = 0; i < compiled_->patterns.size(); ++i) {
        UErrorCode status = U_ZERO_ERROR;
        std::unique_ptr<icu::RegexMatcher> matcher(
            compiled_->patterns[i]->matcher(current, status));
        if (U_FAILURE(status)) {
            throw Error(std::string("regex matcher: ") + u_errorName(status));
        }
        icu::UnicodeString next = matcher->replaceAll(compiled_->replacements[i], status);
        if (U_FAILURE(status)) {
            throw Error("cleaning rule '" + rules_[i].pattern + "': " + u_errorName(status));
        }
        current = std::move(next);
    }
    std::string out;
    current.toUTF8String(out);
    return out;
}

RawPage clean_page(const RawPage &raw, const Cleaner &cleaner)
{
    return RawPage{raw.page_id, raw.title, cleaner.clean_text(raw.body)};
}

// ---- chunking ---------------------------------------------------------------

std::vector<std::string> merge_source_paragraphs(std::string_view body,
                                                 std::size_t merge_threshold)
{
    std::vector<std::string> chunks;
    std::string current;
    std::size_t current_len = 0;
    bool open = false;

    std::size_t pos = 0;
    while (true) {
        const std::size_t nl = body.find('\n', pos);
        const auto piece = body.substr(pos, nl == std::string_view::npos ? body.npos : nl - pos);
        if (open) {
            current += '\n';
            current_len += 1;
        }
        current += piece;
        current_len += text::code_point_length(piece);
        open = true;
        if (current_len > merge_threshold) {
            chunks.push_back(std::move(current));
            current.clear();
            current_len = 0;
            open = false;
        }
        if (nl == std::string_view::npos) {
            break;
        }
        pos = nl + 1;
    }
    if (open) {
        chunks.push_back(std::move(current));
    }
    return chunks;
}

std::string make_para_id(std::string_view page_id, std::size_t ordinal)
{
    return std::string(page_id) + "_" + std::to_string(ordinal);
}

std::vector<Paragraph> chunk_page(const RawPage &page, const ChunkingOptions &options)
{
    std::vector<Paragraph> out;
    const std::size_t title_len =
        text::code_point_length(page.title) + text::code_point_length(title_separator);
    for (auto &chunk : merge_source_paragraphs(page.body, options.merge_threshold)) {
        const std::size_t len = title_len + text::code_point_length(chunk);
        if (len < options.min_len) {
            continue;
        }
        Paragraph p;
        p.ordinal = out.size();
        p.para_id = make_para_id(page.page_id, p.ordinal);
        p.page_id = page.page_id;
        p.page_title = page.title;
        p.text = page.title;
        p.text += title_separator;
        p.text += chunk;
        p.char_len = len;
        out.push_back(std::move(p));
    }
    return out;
}

// ---- corpus -----------------------------------------------------------------

Corpus::Corpus(std::string corpus_id, std::string language, std::vector<Paragraph> paragraphs)
    : corpus_id_(std::move(corpus_id)), language_(std::move(language)),
      paragraphs_(std::move(paragraphs))
{
    std::map<std::string, std::string, std::less<>> title_owner;
    for (std::size_t i = 0; i < paragraphs_.size(); ++i) {
        const auto &p = paragraphs_[i];
        if (!by_id_.emplace(p.para_id, i).second) {
            throw FormatError("duplicate para_id '" + p.para_id + "'");
        }
        auto [owner, inserted] = title_owner.emplace(p.page_title, p.page_id);
        if (!inserted && owner->second != p.page_id) {
            throw FormatError("pages '" + owner->second + "' and '" + p.page_id +
                              "' share the title '" + p.page_title + "'");
        }
        page_index_[p.page_id].push_back(i);
    }
    for (auto &[page_id, indices] : page_index_) {
        std::stable_sort(indices.begin(), indices.end(), [this](std::size_t a, std::size_t b) {
            return paragraphs_[a].ordinal < paragraphs_[b].ordinal;
        });
        for (std::size_t k = 1; k < indices.size(); ++k) {
            if (paragraphs_[indices[k - 1]].ordinal == paragraphs_[indices[k]].ordinal) {
                throw FormatError("page '" + page_id + "' repeats ordinal " +
                                  std::to_string(paragraphs_[indices[k]].ordinal));
            }
        }
    }
}

const Paragraph *Corpus::find(std::string_view para_id) const
{
    auto it = by_id_.find(para_id);
    return it == by_id_.end() ? nullptr : &paragraphs_[it->second];
}

bool Corpus::has_page(std::string_view page_id) const
{
    return page_index_.find(page_id) != page_index_.end();
}

std::vector<const Paragraph *> Corpus::page(std::string_view page_id) const
{
    std::vector<const Paragraph *> out;
    auto it = page_index_.find(page_id);
    if (it == page_index_.end()) {
        return out;
    }
    out.reserve(it->second.size());
    for (std::size_t i : it->second) {
        out.push_back(&paragraphs_[i]);
    }
    return out;
}

void Corpus::save_jsonl(const std::filesystem::path &path) const
{
    JsonlWriter out(path);
    for (const auto &p : paragraphs_) {
        out.write(json{{"para_id", p.para_id},
                       {"page_id", p.page_id},
                       {"page_title", p.page_title},
                       {"ordinal", p.ordinal},
                       {"text", p.text}});
    }
    out.close();
}

Corpus Corpus::load_jsonl(const std::filesystem::path &path, std::string corpus_id,
                          std::string language)
{
    std::vector<Paragraph> paragraphs;
    read_jsonl(path, [&paragraphs](const json &r, std::size_t) {
        Paragraph p;
        p.para_id = r.at("para_id").get<std::string>();
        p.page_id = r.at("page_id").get<std::string>();
        p.page_title = r.at("page_title").get<std::string>();
        p.ordinal = r.at("ordinal").get<std::size_t>();
        p.text = r.at("text").get<std::string>();
        p.char_len = text::code_point_length(p.text);
        paragraphs.push_back(std::move(p));
    });
    if (corpus_id.empty()) {
        corpus_id = path.stem().string();
    }
    return Corpus(std::move(corpus_id), std::move(language), std::move(paragraphs));
}

Corpus build_corpus(std::span<const RawPage> pages, const CorpusOptions &options)
{
    std::set<std::string, std::less<>> seen_titles;
    std::set<std::string, std::less<>> seen_ids;
    std::vector<Paragraph> paragraphs;
    for (const auto &page : pages) {
        if (page.title.empty()) {
            throw PreconditionError("page '" + page.page_id + "' has an empty title");
        }
        if (!seen_titles.insert(page.title).second) {
            continue;
        }
        if (!seen_ids.insert(page.page_id).second) {
            throw PreconditionError("page id '" + page.page_id + "' used by two titles");
        }
        auto chunks = chunk_page(page, options.chunking);
        std::move(chunks.begin(), chunks.end(), std::back_inserter(paragraphs));
    }

    if (options.drop_top_duplicates > 0) {
        std::unordered_map<std::string_view, std::size_t> frequency;
        for (const auto &p : paragraphs) {
            ++frequency[p.body()];
        }
        std::vector<std::pair<std::string_view, std::size_t>> duplicated;
        for (const auto &[body, count] : frequency) {
            if (count > 1) {
                duplicated.emplace_back(body, count);
            }
        }
        std::sort(duplicated.begin(), duplicated.end(), [](const auto &a, const auto &b) {
            return a.second != b.second ? a.second > b.second : a.first < b.first;
        });
        duplicated.resize(std::min(duplicated.size(), options.drop_top_duplicates));
        std::set<std::string, std::less<>> dropped;
        for (const auto &d : duplicated) {
            dropped.emplace(d.first);
        }
        std::erase_if(paragraphs,
                      [&dropped](const Paragraph &p) { return dropped.contains(p.body()); });
    }
    return Corpus(options.corpus_id, options.language, std::move(paragraphs));
}

std::vector<RawPage> read_dump(const std::filesystem::path &dump)
{
    std::vector<std::filesystem::path> files;
    if (std::filesystem::is_directory(dump)) {
        for (const auto &entry : std::filesystem::recursive_directory_iterator(dump)) {
            if (entry.is_regular_file() && entry.path().filename().string().front() != '.') {
                files.push_back(entry.path());
            }
        }
        std::sort(files.begin(), files.end());
    } else {
        files.push_back(dump);
    }

    std::vector<RawPage> pages;
    for (const auto &file : files) {
        read_jsonl(file, [&pages](const json &r, std::size_t) {
            const auto &id = r.at("id");
            pages.push_back(RawPage{id.is_string() ? id.get<std::string>() : id.dump(),
                                    r.at("title").get<std::string>(),
                                    r.at("text").get<std::string>()});
        });
    }
    return pages;
}

}  // namespace factcheck
