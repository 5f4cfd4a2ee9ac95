#include "factcheck/http_server.hpp"

#include <httplib.h>

#include "factcheck/log.hpp"

namespace factcheck {

namespace {

void send_json(httplib::Response &res, int status, const json &body)
{
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response &res, const ServiceError &e)
{
    json body{{"error", e.what()}, {"status", e.status()}};
    if (!e.role().empty()) {
        body["role"] = e.role();
    }
    send_json(res, e.status(), body);
}

}  // namespace

struct HttpServer::Impl {
    const Service &service;
    httplib::Server server;

    explicit Impl(const Service &s) : service(s) {}

    void verify(const httplib::Request &req, httplib::Response &res) const
    {
        json body;
        try {
            body = json::parse(req.body);
        } catch (const json::exception &e) {
            send_json(res, 400, {{"error", std::string("request body is not JSON: ") + e.what()}});
            return;
        }
        try {
            if (!body.is_object() || !body.contains("claim") || !body.at("claim").is_string()) {
                throw ServiceError(422, "request needs a string field 'claim'");
            }
            std::optional<RetrievalMode> mode;
            std::optional<std::size_t> k;
            if (body.contains("mode") && !body.at("mode").is_null()) {
                try {
                    mode = parse_retrieval_mode(body.at("mode").get<std::string>());
                } catch (const std::exception &e) {
                    throw ServiceError(422, e.what());
                }
            }
            if (body.contains("k") && !body.at("k").is_null()) {
                if (!body.at("k").is_number_unsigned()) {
                    throw ServiceError(422, "'k' must be a positive integer");
                }
                k = body.at("k").get<std::size_t>();
            }
            const auto response = service.verify(body.at("claim").get<std::string>(), mode, k);
            send_json(res, 200, response.to_json());
        } catch (const ServiceError &e) {
            send_error(res, e);
        }
    }

    void document(const httplib::Request &req, httplib::Response &res) const
    {
        try {
            send_json(res, 200, service.get_document(req.matches[1].str()));
        } catch (const ServiceError &e) {
            send_error(res, e);
        }
    }
};

HttpServer::HttpServer(const Service &service, std::optional<std::filesystem::path> static_dir)
    : impl_(std::make_unique<Impl>(service))
{
    auto &server = impl_->server;
    Impl *impl = impl_.get();
    server.Post("/v1/verify",
                [impl](const httplib::Request &req, httplib::Response &res) { impl->verify(req, res); });
    server.Get(R"(/v1/document/(.+))", [impl](const httplib::Request &req, httplib::Response &res) {
        impl->document(req, res);
    });
    server.Get("/v1/health", [impl](const httplib::Request &, httplib::Response &res) {
        send_json(res, 200, impl->service.health());
    });
    server.set_exception_handler(
        [](const httplib::Request &, httplib::Response &res, std::exception_ptr ep) {
            std::string what = "internal error";
            try {
                std::rethrow_exception(ep);
            } catch (const std::exception &e) {
                what = e.what();
            } catch (...) {
            }
            log::error("request failed: " + what);
            send_json(res, 500, {{"error", what}});
        });
    if (static_dir) {
        if (!server.set_mount_point("/", static_dir->string())) {
            log::warn("static directory " + static_dir->string() + " is not mountable");
        }
    }
}

HttpServer::~HttpServer()
{
    stop();
}

int HttpServer::bind(const std::string &host, int port)
{
    if (port == 0) {
        return impl_->server.bind_to_any_port(host);
    }
    return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::serve()
{
    return impl_->server.listen_after_bind();
}

void HttpServer::stop()
{
    if (impl_->server.is_running()) {
        impl_->server.stop();
    }
}

void HttpServer::wait_until_ready() const
{
    impl_->server.wait_until_ready();
}

}  // namespace factcheck
