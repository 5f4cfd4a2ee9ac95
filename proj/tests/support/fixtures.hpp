#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "factcheck/corpus.hpp"
#include "factcheck/model_gateway.hpp"

namespace fixture {

inline constexpr std::size_t page_count = 10;
inline constexpr std::size_t paragraphs_per_page = 3;

/// The sentence that makes paragraph `ordinal` of page `page` unique.
std::string fact_sentence(std::size_t page, std::size_t ordinal);
std::string page_title(std::size_t page);

/// Ten pages of three source paragraphs, each longer than 1000 characters, so
/// default chunking yields exactly one paragraph per source paragraph.
std::vector<factcheck::RawPage> pages();
factcheck::Corpus corpus();

/// Random lowercase words drawn from a small Zipf-like vocabulary.
std::string random_text(std::mt19937_64 &rng, std::size_t words, std::size_t vocab = 60);

/// Fresh directory removed on destruction.
class TempDir {
   public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir &) = delete;
    TempDir &operator=(const TempDir &) = delete;

    [[nodiscard]] const std::filesystem::path &path() const noexcept { return path_; }
    [[nodiscard]] std::filesystem::path operator/(const std::string &name) const
    {
        return path_ / name;
    }

   private:
    std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path &path);

/// HTTP model server speaking the backend protocol, answering with the stub
/// rules. Individual roles can be switched to fail with a status code.
class BackendServer {
   public:
    explicit BackendServer(std::shared_ptr<const factcheck::InvertedIndex> index = nullptr);
    ~BackendServer();

    BackendServer(const BackendServer &) = delete;
    BackendServer &operator=(const BackendServer &) = delete;

    [[nodiscard]] std::string endpoint(factcheck::Role role) const;
    [[nodiscard]] int port() const noexcept { return port_; }
    void fail_with(factcheck::Role role, int status);
    void stop();
    [[nodiscard]] std::size_t requests() const noexcept { return requests_; }

    /// Config pointing every role at this server.
    [[nodiscard]] factcheck::GatewayConfig gateway_config(const std::string &corpus_id) const;

   private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    int port_ = -1;
    std::atomic<std::size_t> requests_{0};
    std::thread thread_;
};

}  // namespace fixture
