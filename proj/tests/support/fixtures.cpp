#include "fixtures.hpp"

#include <httplib.h>

#include <array>
#include <fstream>
#include <sstream>
#include <mutex>

#include "factcheck/error.hpp"
#include "factcheck/jsonl.hpp"

namespace fixture {

namespace {

constexpr std::array<const char *, page_count> places{
    "Kestrel Harbor", "Marlow Ridge",   "Oakvale Junction", "Brindle Cove",  "Ashford Mills",
    "Corwin Bay",     "Halden Springs", "Pellham Crossing", "Rowan Heights", "Tamsin Falls"};

constexpr std::array<const char *, paragraphs_per_page> landmarks{"lighthouse", "observatory",
                                                                  "aqueduct"};

constexpr std::array<const char *, 12> filler{
    "the committee published a short report about regional transport and weather",
    "several volunteers maintained the archive during quiet winter months",
    "local newspapers described the ceremony with considerable enthusiasm",
    "engineers later inspected foundations and recommended modest repairs",
    "visitors often arrive by train and walk along the old embankment",
    "the museum keeps photographs drawings and letters from that period",
    "a small market operates on weekends near the central square",
    "historians disagree about several details of the early construction",
    "schools organise excursions that combine history with natural science",
    "the surrounding forest shelters birds that nest on high branches",
    "maintenance costs were shared between the town and a private trust",
    "records from the period mention storms floods and a long drought"};

}  // namespace

std::string page_title(std::size_t page)
{
    return std::string(places[page]) + " heritage";
}

std::string fact_sentence(std::size_t page, std::size_t ordinal)
{
    const int year = 1850 + static_cast<int>(page * 10 + ordinal * 3);
    return std::string("The ") + places[page] + " " + landmarks[ordinal] + " opened in " +
           std::to_string(year) + ".";
}

std::vector<factcheck::RawPage> pages()
{
    std::vector<factcheck::RawPage> out;
    for (std::size_t p = 0; p < page_count; ++p) {
        std::string body;
        for (std::size_t o = 0; o < paragraphs_per_page; ++o) {
            std::string para = fact_sentence(p, o);
            for (std::size_t f = 0; f < 2 * filler.size(); ++f) {
                para += " ";
                para += filler[(p + o + f) % filler.size()];
                para += ".";
            }
            body += (o == 0 ? "" : "\n") + para;
        }
        out.push_back(factcheck::RawPage{"page" + std::to_string(p), page_title(p), body});
    }
    return out;
}

factcheck::Corpus corpus()
{
    factcheck::CorpusOptions options;
    options.corpus_id = "fixture";
    options.language = "en";
    return factcheck::build_corpus(pages(), options);
}

std::string random_text(std::mt19937_64 &rng, std::size_t words, std::size_t vocab)
{
    // Squaring a uniform draw skews towards low word numbers.
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::string out;
    for (std::size_t i = 0; i < words; ++i) {
        const double x = u(rng);
        const auto w = static_cast<std::size_t>(x * x * static_cast<double>(vocab));
        if (!out.empty()) {
            out += ' ';
        }
        out += "w" + std::to_string(w);
    }
    return out;
}

TempDir::TempDir()
{
    static std::atomic<unsigned> counter{0};
    std::random_device seed;
    path_ = std::filesystem::temp_directory_path() /
            ("factcheck-test-" + std::to_string(seed()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
}

TempDir::~TempDir()
{
    std::error_code ignored;
    std::filesystem::remove_all(path_, ignored);
}

std::string read_file(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

// ---- backend server ---------------------------------------------------------

struct BackendServer::Impl {
    httplib::Server server;
    factcheck::StubBackend stub;
    std::mutex mutex;
    std::map<factcheck::Role, int> failures;

    explicit Impl(std::shared_ptr<const factcheck::InvertedIndex> index) : stub(0, std::move(index))
    {
    }

    int failure(factcheck::Role role)
    {
        std::lock_guard lock(mutex);
        auto it = failures.find(role);
        return it == failures.end() ? 0 : it->second;
    }
};

BackendServer::BackendServer(std::shared_ptr<const factcheck::InvertedIndex> index)
    : impl_(std::make_unique<Impl>(std::move(index)))
{
    using factcheck::json;
    using factcheck::Role;
    auto *impl = impl_.get();
    auto route = [this, impl](Role role, auto handler) {
        const std::string path = "/" + std::string(factcheck::to_string(role));
        impl->server.Post(path, [this, impl, role, handler](const httplib::Request &req,
                                                            httplib::Response &res) {
            ++requests_;
            if (int status = impl->failure(role); status != 0) {
                res.status = status;
                res.set_content(R"({"error":"injected failure"})", "application/json");
                return;
            }
            try {
                res.set_content(handler(json::parse(req.body)).dump(), "application/json");
            } catch (const factcheck::UnknownCorpusError &) {
                res.status = 404;
            } catch (const std::exception &e) {
                res.status = 400;
                res.set_content(json{{"error", e.what()}}.dump(), "application/json");
            }
        });
        impl->server.Get(path, [](const httplib::Request &, httplib::Response &res) {
            res.set_content("{}", "application/json");
        });
    };
    route(Role::ner, [impl](const json &body) {
        json entities = json::array();
        for (const auto &e : impl->stub.ner(body.at("text").get<std::string>())) {
            entities.push_back(
                json{{"text", e.text}, {"type", e.type}, {"start", e.start}, {"end", e.end}});
        }
        return json{{"entities", entities}};
    });
    route(Role::qg, [impl](const json &body) {
        factcheck::Entity answer{body.at("answer").get<std::string>(),
                                 body.value("answer_type", std::string{}), 0, 0};
        return json{{"question", impl->stub.question(answer, body.at("context").get<std::string>())}};
    });
    route(Role::cg, [impl](const json &body) {
        return json{{"claim", impl->stub.claim(body.at("answer").get<std::string>(),
                                               body.at("question").get<std::string>())}};
    });
    route(Role::dense, [impl](const json &body) {
        json results = json::array();
        for (const auto &r : impl->stub.dense(body.at("claim").get<std::string>(),
                                              body.at("k").get<std::size_t>())) {
            results.push_back(json{{"para_id", r.para_id}, {"score", r.score}});
        }
        return json{{"results", results}};
    });
    route(Role::nli, [impl](const json &body) {
        return json{{"logits", impl->stub
                                   .nli(body.at("claim").get<std::string>(),
                                        body.at("evidence").get<std::string>())
                                   .values}};
    });
    port_ = impl_->server.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([impl] { impl->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
}

BackendServer::~BackendServer()
{
    stop();
}

std::string BackendServer::endpoint(factcheck::Role role) const
{
    return "http://127.0.0.1:" + std::to_string(port_) + "/" + std::string(factcheck::to_string(role));
}

void BackendServer::fail_with(factcheck::Role role, int status)
{
    std::lock_guard lock(impl_->mutex);
    impl_->failures[role] = status;
}

void BackendServer::stop()
{
    if (thread_.joinable()) {
        impl_->server.stop();
        thread_.join();
    }
}

factcheck::GatewayConfig BackendServer::gateway_config(const std::string &corpus_id) const
{
    factcheck::GatewayConfig config;
    config.corpus_id = corpus_id;
    for (factcheck::Role role : factcheck::all_roles) {
        factcheck::BackendConfig b;
        b.role = role;
        b.kind = factcheck::BackendConfig::Kind::remote;
        b.endpoint = endpoint(role);
        b.timeout = std::chrono::milliseconds(2000);
        config.backends[role] = b;
    }
    return config;
}

}  // namespace fixture
