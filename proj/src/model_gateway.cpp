#include "factcheck/model_gateway.hpp"

#include <algorithm>
#include <cmath>
#include <semaphore>
#include <set>

#include <httplib.h>
#include <unicode/uchar.h>

#include "factcheck/error.hpp"
#include "factcheck/log.hpp"
#include "factcheck/text.hpp"

namespace factcheck {

std::string_view to_string(Role role)
{
    switch (role) {
    case Role::ner:
        return "ner";
    case Role::qg:
        return "qg";
    case Role::cg:
        return "cg";
    case Role::dense:
        return "dense";
    case Role::nli:
        return "nli";
    }
    return "?";
}

Role parse_role(std::string_view text)
{
    for (Role r : all_roles) {
        if (to_string(r) == text) {
            return r;
        }
    }
    throw FormatError("unknown backend role '" + std::string(text) + "'");
}

// ---- configuration ----------------------------------------------------------

void BackendConfig::validate() const
{
    const std::string name(to_string(role));
    if (kind == Kind::remote && endpoint.empty()) {
        throw PreconditionError(name + ": remote backend requires an endpoint");
    }
    if (kind == Kind::stub && !stub_seed.has_value()) {
        throw PreconditionError(name + ": stub backend requires stub_seed");
    }
    if (max_connections == 0) {
        throw PreconditionError(name + ": max_connections must be positive");
    }
}

GatewayConfig GatewayConfig::from_json(const json &doc)
{
    GatewayConfig config;
    try {
        config.corpus_id = doc.value("corpus_id", std::string{});
        for (const auto &[name, entry] : doc.at("backends").items()) {
            BackendConfig b;
            b.role = parse_role(name);
            const auto kind = entry.at("kind").get<std::string>();
            if (kind == "remote") {
                b.kind = BackendConfig::Kind::remote;
                b.endpoint = entry.at("endpoint").get<std::string>();
            } else if (kind == "stub") {
                b.kind = BackendConfig::Kind::stub;
                b.stub_seed = entry.at("stub_seed").get<std::uint64_t>();
            } else {
                throw FormatError(name + ": unknown backend kind '" + kind + "'");
            }
            b.timeout = std::chrono::milliseconds(entry.value("timeout_ms", 30000));
            b.max_connections = entry.value("max_connections", std::size_t{8});
            b.validate();
            config.backends[b.role] = b;
        }
    } catch (const json::exception &e) {
        throw FormatError(std::string("backend config: ") + e.what());
    }
    return config;
}

GatewayConfig GatewayConfig::load(const std::filesystem::path &path)
{
    return from_json(read_json_file(path));
}

GatewayConfig GatewayConfig::all_stubs(std::uint64_t seed)
{
    GatewayConfig config;
    for (Role r : all_roles) {
        BackendConfig b;
        b.role = r;
        b.kind = BackendConfig::Kind::stub;
        b.stub_seed = seed;
        config.backends[r] = b;
    }
    return config;
}

// ---- Backend defaults -------------------------------------------------------

namespace {

[[noreturn]] void unsupported(std::string_view what)
{
    throw PreconditionError("backend does not serve role " + std::string(what));
}

}  // namespace

std::vector<Entity> Backend::ner(std::string_view) const { unsupported("ner"); }
std::string Backend::question(const Entity &, std::string_view) const { unsupported("qg"); }
std::string Backend::claim(std::string_view, std::string_view) const { unsupported("cg"); }
std::vector<RankedEvidence> Backend::dense(std::string_view, std::size_t) const
{
    unsupported("dense");
}
NliLogits Backend::nli(std::string_view, std::string_view) const { unsupported("nli"); }

// ---- stub -------------------------------------------------------------------

StubBackend::StubBackend(std::uint64_t seed, std::shared_ptr<const InvertedIndex> index)
    : seed_(seed), index_(std::move(index))
{
}

std::vector<Entity> StubBackend::ner(std::string_view text) const
{
    const std::u32string cps = text::to_u32(text);
    const std::size_t n = cps.size();
    auto is_alpha = [&](std::size_t i) { return i < n && u_isalpha(static_cast<UChar32>(cps[i])); };
    auto is_upper = [&](std::size_t i) { return i < n && u_isupper(static_cast<UChar32>(cps[i])); };
    auto is_digit = [&](std::size_t i) { return i < n && u_isdigit(static_cast<UChar32>(cps[i])); };

    std::vector<Entity> out;
    auto emit = [&](std::size_t start, std::size_t end, const char *type) {
        out.push_back(Entity{text::to_utf8(std::u32string_view(cps).substr(start, end - start)),
                             type, start, end});
    };

    std::size_t i = 0;
    while (i < n) {
        if (is_digit(i)) {
            std::size_t j = i;
            while (is_digit(j)) {
                ++j;
            }
            emit(i, j, "NUM");
            i = j;
        } else if (is_upper(i)) {
            std::size_t j = i;
            while (is_alpha(j)) {
                ++j;
            }
            // Extend across single spaces while the next word is capitalized.
            while (j + 1 < n && cps[j] == U' ' && is_upper(j + 1)) {
                j += 1;
                while (is_alpha(j)) {
                    ++j;
                }
            }
            emit(i, j, "PER");
            i = j;
        } else if (is_alpha(i)) {
            while (is_alpha(i)) {
                ++i;
            }
        } else {
            ++i;
        }
    }
    return out;
}

std::string StubBackend::question(const Entity &answer, std::string_view context) const
{
    return "STUB-Q[" + answer.text + "]: which? " + std::string(context);
}

std::string StubBackend::claim(std::string_view answer, std::string_view question) const
{
    static const std::set<std::string, std::less<>> wh_words{"when", "what", "who", "whom",
                                                             "where", "which", "why", "how"};
    static const std::set<std::string, std::less<>> auxiliaries{"was", "is",   "were", "are",
                                                                "did", "does", "do"};
    std::string q(question);
    while (!q.empty() && (q.back() == '?' || q.back() == ' ' || q.back() == '\n')) {
        q.pop_back();
    }
    // Drop a leading "<wh-word> <auxiliary> " pair.
    const auto first_space = q.find(' ');
    if (first_space != std::string::npos) {
        const auto second_space = q.find(' ', first_space + 1);
        if (second_space != std::string::npos) {
            const std::string first = text::to_lower(q.substr(0, first_space));
            const std::string second =
                text::to_lower(q.substr(first_space + 1, second_space - first_space - 1));
            if (wh_words.contains(first) && auxiliaries.contains(second)) {
                q.erase(0, second_space + 1);
            }
        }
    }
    return "STUB-C: " + q + " = " + std::string(answer) + ".";
}

std::vector<RankedEvidence> StubBackend::dense(std::string_view claim, std::size_t k) const
{
    if (!index_) {
        throw UnknownCorpusError("stub dense backend has no index attached");
    }
    auto results = index_->search(claim, k, Bm25Params::full_text());
    for (auto &r : results) {
        r.stage = Stage::dense;
    }
    return results;
}

NliLogits StubBackend::nli(std::string_view claim, std::string_view evidence) const
{
    const auto claim_tokens = tokenize(claim);
    const auto evidence_tokens = tokenize(evidence);
    const std::set<std::string> a(claim_tokens.begin(), claim_tokens.end());
    const std::set<std::string> b(evidence_tokens.begin(), evidence_tokens.end());
    std::size_t shared = 0;
    for (const auto &t : a) {
        shared += b.count(t);
    }
    const double overlap = static_cast<double>(shared) - 2.0;
    return NliLogits{{overlap, -overlap, 0.0}};
}

// ---- remote -----------------------------------------------------------------

struct RemoteBackend::Impl {
    BackendConfig config;
    std::string corpus_id;
    std::string base;  // scheme://host[:port]
    std::string path;
    std::counting_semaphore<1024> slots;

    Impl(const BackendConfig &c, std::string corpus)
        : config(c), corpus_id(std::move(corpus)),
          slots(static_cast<std::ptrdiff_t>(std::min<std::size_t>(c.max_connections, 1024)))
    {
        const auto scheme_end = c.endpoint.find("://");
        const auto host_begin = scheme_end == std::string::npos ? 0 : scheme_end + 3;
        const auto path_begin = c.endpoint.find('/', host_begin);
        base = c.endpoint.substr(0, path_begin);
        path = path_begin == std::string::npos ? "/" : c.endpoint.substr(path_begin);
    }

    [[nodiscard]] std::string role() const { return std::string(to_string(config.role)); }

    httplib::Client client() const
    {
        httplib::Client cli(base);
        const auto ms = config.timeout.count();
        cli.set_connection_timeout(std::chrono::milliseconds(ms));
        cli.set_read_timeout(std::chrono::milliseconds(ms));
        cli.set_write_timeout(std::chrono::milliseconds(ms));
        return cli;
    }
};

RemoteBackend::RemoteBackend(const BackendConfig &config, std::string corpus_id)
    : impl_(std::make_unique<Impl>(config, std::move(corpus_id)))
{
    config.validate();
}

RemoteBackend::~RemoteBackend() = default;

json RemoteBackend::post(const json &body) const
{
    auto &impl = *impl_;
    impl.slots.acquire();
    struct Release {
        std::counting_semaphore<1024> &s;
        ~Release() { s.release(); }
    } release{impl.slots};

    const std::string payload = body.dump();
    std::string failure;
    for (int attempt = 0; attempt < 2; ++attempt) {
        auto cli = impl.client();
        auto res = cli.Post(impl.path, payload, "application/json");
        if (!res) {
            failure = "request to " + impl.config.endpoint + " failed: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 500) {
            failure = "HTTP " + std::to_string(res->status) + " from " + impl.config.endpoint;
            continue;
        }
        if (res->status == 404 && impl.config.role == Role::dense) {
            throw UnknownCorpusError("dense backend does not know corpus '" + impl.corpus_id + "'");
        }
        if (res->status != 200) {
            throw TransportError(impl.role(), "HTTP " + std::to_string(res->status) + " from " +
                                                  impl.config.endpoint);
        }
        try {
            return json::parse(res->body);
        } catch (const json::parse_error &) {
            throw TransportError(impl.role(), "malformed JSON response");
        }
    }
    throw TransportError(impl.role(), failure);
}

std::vector<Entity> RemoteBackend::ner(std::string_view text) const
{
    const json r = post(json{{"text", text}});
    std::vector<Entity> out;
    try {
        for (const auto &e : r.at("entities")) {
            out.push_back(Entity{e.at("text").get<std::string>(), e.at("type").get<std::string>(),
                                 e.at("start").get<std::size_t>(), e.at("end").get<std::size_t>()});
        }
    } catch (const json::exception &e) {
        throw TransportError("ner", std::string("unexpected response: ") + e.what());
    }
    return out;
}

std::string RemoteBackend::question(const Entity &answer, std::string_view context) const
{
    const json r =
        post(json{{"answer", answer.text}, {"answer_type", answer.type}, {"context", context}});
    if (!r.contains("question") || !r["question"].is_string()) {
        throw TransportError("qg", "response lacks 'question'");
    }
    return r["question"].get<std::string>();
}

std::string RemoteBackend::claim(std::string_view answer, std::string_view question) const
{
    const json r = post(json{{"answer", answer}, {"question", question}});
    if (!r.contains("claim") || !r["claim"].is_string()) {
        throw TransportError("cg", "response lacks 'claim'");
    }
    return r["claim"].get<std::string>();
}

std::vector<RankedEvidence> RemoteBackend::dense(std::string_view claim, std::size_t k) const
{
    const json r = post(json{{"claim", claim}, {"k", k}, {"corpus", impl_->corpus_id}});
    std::vector<RankedEvidence> out;
    try {
        for (const auto &e : r.at("results")) {
            out.push_back(RankedEvidence{e.at("para_id").get<std::string>(),
                                         e.at("score").get<double>(), out.size() + 1, Stage::dense});
        }
    } catch (const json::exception &e) {
        throw TransportError("dense", std::string("unexpected response: ") + e.what());
    }
    return out;
}

NliLogits RemoteBackend::nli(std::string_view claim, std::string_view evidence) const
{
    const json r = post(json{{"claim", claim}, {"evidence", evidence}});
    NliLogits logits;
    try {
        const auto &v = r.at("logits");
        if (v.size() != 3) {
            throw TransportError("nli", "expected 3 logits, got " + std::to_string(v.size()));
        }
        for (std::size_t i = 0; i < 3; ++i) {
            logits.values[i] = v[i].get<double>();
        }
    } catch (const json::exception &e) {
        throw TransportError("nli", std::string("unexpected response: ") + e.what());
    }
    return logits;
}

bool RemoteBackend::reachable() const noexcept
{
    try {
        auto cli = impl_->client();
        cli.set_connection_timeout(std::chrono::seconds(2));
        cli.set_read_timeout(std::chrono::seconds(2));
        auto res = cli.Get(impl_->path);
        return static_cast<bool>(res);
    } catch (...) {
        return false;
    }
}

// ---- gateway ----------------------------------------------------------------

ModelGateway ModelGateway::from_config(const GatewayConfig &config,
                                       std::shared_ptr<const InvertedIndex> stub_index)
{
    ModelGateway gw;
    for (const auto &[role, b] : config.backends) {
        b.validate();
        if (b.kind == BackendConfig::Kind::stub) {
            gw.set_backend(role, std::make_shared<StubBackend>(*b.stub_seed, stub_index));
        } else {
            gw.set_backend(role, std::make_shared<RemoteBackend>(b, config.corpus_id));
        }
    }
    return gw;
}

void ModelGateway::set_backend(Role role, std::shared_ptr<const Backend> backend)
{
    backends_[static_cast<std::size_t>(role)] = std::move(backend);
}

bool ModelGateway::configured(Role role) const
{
    return backends_[static_cast<std::size_t>(role)] != nullptr;
}

const Backend &ModelGateway::backend(Role role) const
{
    const auto &b = backends_[static_cast<std::size_t>(role)];
    if (!b) {
        throw PreconditionError("no backend configured for role " + std::string(to_string(role)));
    }
    return *b;
}

std::vector<Entity> ModelGateway::ner(std::string_view text) const
{
    if (text.empty()) {
        return {};
    }
    auto raw = backend(Role::ner).ner(text);
    const std::size_t len = text::code_point_length(text);
    std::vector<Entity> out;
    for (auto &e : raw) {
        if (!(e.start < e.end && e.end <= len) || text::slice(text, e.start, e.end) != e.text) {
            log::warn("ner: dropping entity '" + e.text + "' with invalid span [" +
                      std::to_string(e.start) + ", " + std::to_string(e.end) + ")");
            continue;
        }
        const bool duplicate = std::any_of(out.begin(), out.end(),
                                           [&e](const Entity &o) { return o.same_identity(e); });
        if (!duplicate) {
            out.push_back(std::move(e));
        }
    }
    return out;
}

std::string ModelGateway::generate_question(const Entity &answer, std::string_view context) const
{
    if (context.empty()) {
        throw PreconditionError("generate_question: empty context");
    }
    if (answer.text.empty() || context.find(answer.text) == std::string_view::npos) {
        throw PreconditionError("generate_question: answer '" + answer.text +
                                "' does not occur in the context");
    }
    auto q = backend(Role::qg).question(answer, context);
    if (q.empty()) {
        throw TransportError("qg", "backend returned an empty question");
    }
    return q;
}

std::string ModelGateway::generate_claim(std::string_view answer, std::string_view question) const
{
    if (answer.empty() || question.empty()) {
        throw PreconditionError("generate_claim: answer and question must be non-empty");
    }
    auto c = backend(Role::cg).claim(answer, question);
    if (c.empty()) {
        throw TransportError("cg", "backend returned an empty claim");
    }
    return c;
}

std::vector<RankedEvidence> ModelGateway::dense_search(std::string_view claim, std::size_t k) const
{
    if (k == 0) {
        throw PreconditionError("dense_search: k must be at least 1");
    }
    auto results = backend(Role::dense).dense(claim, k);
    std::stable_sort(results.begin(), results.end(),
                     [](const RankedEvidence &a, const RankedEvidence &b) { return a.score > b.score; });
    if (results.size() > k) {
        results.resize(k);
    }
    for (std::size_t i = 0; i < results.size(); ++i) {
        results[i].rank = i + 1;
        results[i].stage = Stage::dense;
    }
    return results;
}

NliLogits ModelGateway::nli(std::string_view claim, std::string_view evidence) const
{
    if (claim.empty() || evidence.empty()) {
        throw PreconditionError("nli: claim and evidence must be non-empty");
    }
    auto logits = backend(Role::nli).nli(claim, evidence);
    for (double v : logits.values) {
        if (!std::isfinite(v)) {
            throw TransportError("nli", "backend returned a non-finite logit");
        }
    }
    return logits;
}

std::map<Role, bool> ModelGateway::reachability() const
{
    std::map<Role, bool> out;
    for (Role r : all_roles) {
        const auto &b = backends_[static_cast<std::size_t>(r)];
        out[r] = b != nullptr && b->reachable();
    }
    return out;
}

}  // namespace factcheck
