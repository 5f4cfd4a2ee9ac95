#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "factcheck/calibration.hpp"
#include "factcheck/corpus.hpp"
#include "factcheck/error.hpp"
#include "factcheck/highlight.hpp"
#include "factcheck/jsonl.hpp"
#include "factcheck/lexical_index.hpp"
#include "factcheck/model_gateway.hpp"
#include "factcheck/retrieval.hpp"

namespace factcheck {

/// Failure carrying the HTTP status it maps to and, for 502, the failing role.
class ServiceError : public Error {
   public:
    ServiceError(int status, const std::string &message, std::string role = {})
        : Error(message), status_(status), role_(std::move(role))
    {
    }

    [[nodiscard]] int status() const noexcept { return status_; }
    [[nodiscard]] const std::string &role() const noexcept { return role_; }

   private:
    int status_;
    std::string role_;
};

struct ServiceConfig {
    std::filesystem::path corpus;
    std::filesystem::path index;  // empty: build from the corpus at startup
    std::string corpus_id;
    std::string language;
    std::string url_template;     // "{title}" and "{page_id}" are substituted
    std::optional<std::filesystem::path> scaler_path;
    std::optional<TemperatureScaler> scaler;
    RetrievalConfig retrieval;
    GatewayConfig backends;
    std::optional<std::filesystem::path> static_dir;

    /// Relative paths are resolved against `base_dir`.
    [[nodiscard]] static ServiceConfig from_json(const json &doc,
                                                 const std::filesystem::path &base_dir = {});
    [[nodiscard]] static ServiceConfig load(const std::filesystem::path &path);
};

struct EvidenceResult {
    std::string para_id;
    std::string page_id;
    std::string page_title;
    std::string text;
    double retrieval_score = 0.0;
    NliVerdict verdict;
    std::vector<HighlightSpan> highlights;
    std::optional<std::string> page_url;
    bool is_lead_section = false;
};

struct VerifyResponse {
    std::string claim;
    RetrievalMode mode = RetrievalMode::lexical;
    std::vector<EvidenceResult> results;

    [[nodiscard]] json to_json() const;
};

/// Substitutes the page into a link template; titles use '_' for spaces and
/// both fields are percent-encoded. An empty template yields no link.
[[nodiscard]] std::optional<std::string> page_url(std::string_view url_template,
                                                  std::string_view page_id,
                                                  std::string_view title);

/// Keeps paragraphs of one page together at the position of the page's first
/// (best) paragraph; otherwise preserves the incoming order.
template <typename T, typename PageOf>
[[nodiscard]] std::vector<T> group_by_page(std::vector<T> items, PageOf page_of);

/// Everything the service reads while answering requests. Immutable once built.
struct ServiceState {
    std::shared_ptr<const Corpus> corpus;
    std::shared_ptr<const InvertedIndex> index;
    std::shared_ptr<const ModelGateway> gateway;
    TemperatureScaler scaler;
    RetrievalConfig retrieval;
    std::string url_template;
};

class Service {
   public:
    Service() = default;

    /// Loads corpus, index and scaler and connects the backends.
    void init(const ServiceConfig &config);
    void init(ServiceState state);

    [[nodiscard]] bool ready() const;
    [[nodiscard]] RetrievalConfig default_retrieval() const;

    /// Throws ServiceError: 422 for an empty claim or bad arguments, 502 when
    /// a backend fails, 503 before initialization.
    [[nodiscard]] VerifyResponse verify(std::string_view claim,
                                        std::optional<RetrievalMode> mode = std::nullopt,
                                        std::optional<std::size_t> k = std::nullopt) const;

    /// Throws ServiceError 404 for an unknown page, 503 before initialization.
    [[nodiscard]] json get_document(std::string_view page_id) const;

    /// Never throws.
    [[nodiscard]] json health() const noexcept;

   private:
    mutable std::mutex mutex_;
    std::shared_ptr<const ServiceState> state_;

    [[nodiscard]] std::shared_ptr<const ServiceState> snapshot() const;
};

template <typename T, typename PageOf>
std::vector<T> group_by_page(std::vector<T> items, PageOf page_of)
{
    std::vector<std::string> pages;
    std::vector<std::vector<T>> groups;
    for (auto &item : items) {
        const std::string page = page_of(item);
        std::size_t g = 0;
        while (g < pages.size() && pages[g] != page) {
            ++g;
        }
        if (g == pages.size()) {
            pages.push_back(page);
            groups.emplace_back();
        }
        groups[g].push_back(std::move(item));
    }
    std::vector<T> out;
    out.reserve(items.size());
    for (auto &group : groups) {
        for (auto &item : group) {
            out.push_back(std::move(item));
        }
    }
    return out;
}

}  // namespace factcheck
