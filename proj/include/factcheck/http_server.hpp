#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "factcheck/service.hpp"

namespace factcheck {

/// JSON API under /v1 on top of a Service, plus optional static frontend files.
///   POST /v1/verify            {"claim", "mode", "k"}
///   GET  /v1/document/{page_id}
///   GET  /v1/health
class HttpServer {
   public:
    explicit HttpServer(const Service &service,
                        std::optional<std::filesystem::path> static_dir = std::nullopt);
    ~HttpServer();

    HttpServer(const HttpServer &) = delete;
    HttpServer &operator=(const HttpServer &) = delete;

    /// Binds without serving; port 0 picks a free port. Returns the bound port
    /// or -1.
    int bind(const std::string &host, int port);
    /// Serves until stop(). Call after bind().
    bool serve();
    void stop();
    void wait_until_ready() const;

   private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace factcheck
