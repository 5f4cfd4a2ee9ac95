#include "factcheck/service.hpp"

#include <algorithm>
#include <cctype>

#include "factcheck/log.hpp"

namespace factcheck {

namespace {

std::filesystem::path resolve(const std::filesystem::path &base, const std::string &value)
{
    std::filesystem::path p(value);
    return p.is_absolute() || base.empty() ? p : base / p;
}

std::string percent_encode(std::string_view raw)
{
    static constexpr char hex[] = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : raw) {
        if (std::isalnum(c) != 0 || c == '-' || c == '_' || c == '.' || c == '~') {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back('%');
            out.push_back(hex[c >> 4]);
            out.push_back(hex[c & 0x0F]);
        }
    }
    return out;
}

void replace_all(std::string &text, std::string_view from, std::string_view to)
{
    for (std::size_t pos = text.find(from); pos != std::string::npos;
         pos = text.find(from, pos + to.size())) {
        text.replace(pos, from.size(), to);
    }
}

bool blank(std::string_view text)
{
    return std::all_of(text.begin(), text.end(),
                       [](unsigned char c) { return std::isspace(c) != 0; });
}

json optional_json(const std::optional<std::string> &value)
{
    return value ? json(*value) : json(nullptr);
}

std::vector<Role> roles_for(RetrievalMode mode)
{
    switch (mode) {
    case RetrievalMode::lexical:
        return {Role::nli};
    case RetrievalMode::dense:
    case RetrievalMode::dense_ans:
    case RetrievalMode::dense_nli:
        return {Role::dense, Role::nli};
    }
    return {};
}

}  // namespace

// ---- configuration ----------------------------------------------------------

ServiceConfig ServiceConfig::from_json(const json &doc, const std::filesystem::path &base_dir)
{
    ServiceConfig c;
    try {
        c.corpus = resolve(base_dir, doc.at("corpus").get<std::string>());
        if (doc.contains("index")) {
            c.index = resolve(base_dir, doc.at("index").get<std::string>());
        }
        c.corpus_id = doc.value("corpus_id", std::string{});
        c.language = doc.value("language", std::string{});
        c.url_template = doc.value("url_template", std::string{});
        if (doc.contains("scaler")) {
            const auto &s = doc.at("scaler");
            if (s.is_string()) {
                c.scaler_path = resolve(base_dir, s.get<std::string>());
            } else {
                c.scaler = TemperatureScaler::from_json(s);
            }
        }
        if (doc.contains("retrieval")) {
            const auto &r = doc.at("retrieval");
            c.retrieval.mode = parse_retrieval_mode(r.value("mode", std::string("lexical")));
            c.retrieval.k = r.value("k", c.retrieval.k);
            c.retrieval.ans_k = r.value("ans_k", c.retrieval.ans_k);
            c.retrieval.nli_k2 = r.value("nli_k2", c.retrieval.nli_k2);
            c.retrieval.bm25.k1 = r.value("k1", c.retrieval.bm25.k1);
            c.retrieval.bm25.b = r.value("b", c.retrieval.bm25.b);
        }
        c.retrieval.validate();
        c.backends = GatewayConfig::from_json(doc);
        if (doc.contains("static_dir")) {
            c.static_dir = resolve(base_dir, doc.at("static_dir").get<std::string>());
        }
    } catch (const json::exception &e) {
        throw FormatError(std::string("service config: ") + e.what());
    }
    return c;
}

ServiceConfig ServiceConfig::load(const std::filesystem::path &path)
{
    return from_json(read_json_file(path), path.parent_path());
}

std::optional<std::string> page_url(std::string_view url_template, std::string_view page_id,
                                    std::string_view title)
{
    if (url_template.empty()) {
        return std::nullopt;
    }
    std::string underscored(title);
    std::replace(underscored.begin(), underscored.end(), ' ', '_');
    std::string url(url_template);
    replace_all(url, "{title}", percent_encode(underscored));
    replace_all(url, "{page_id}", percent_encode(page_id));
    return url;
}

json VerifyResponse::to_json() const
{
    json items = json::array();
    for (const auto &r : results) {
        json spans = json::array();
        for (const auto &h : r.highlights) {
            spans.push_back(factcheck::to_json(h));
        }
        items.push_back(json{{"para_id", r.para_id},
                             {"page_id", r.page_id},
                             {"page_title", r.page_title},
                             {"text", r.text},
                             {"retrieval_score", r.retrieval_score},
                             {"verdict", factcheck::to_json(r.verdict)},
                             {"highlights", spans},
                             {"page_url", optional_json(r.page_url)},
                             {"is_lead_section", r.is_lead_section}});
    }
    return json{{"claim", claim}, {"mode", to_string(mode)}, {"results", items}};
}

// ---- service ----------------------------------------------------------------

void Service::init(const ServiceConfig &config)
{
    auto corpus = std::make_shared<const Corpus>(
        Corpus::load_jsonl(config.corpus, config.corpus_id, config.language));
    log::info("loaded corpus '" + corpus->corpus_id() + "' with " +
              std::to_string(corpus->size()) + " paragraphs");

    std::shared_ptr<const InvertedIndex> index;
    if (config.index.empty()) {
        index = std::make_shared<const InvertedIndex>(build_index(*corpus));
        log::info("built lexical index over " + std::to_string(index->doc_count()) + " documents");
    } else {
        index = std::make_shared<const InvertedIndex>(InvertedIndex::load(config.index));
    }

    TemperatureScaler scaler;
    if (config.scaler_path) {
        scaler = TemperatureScaler::load(*config.scaler_path);
    } else if (config.scaler) {
        scaler = *config.scaler;
    } else {
        log::warn("no scaler configured; verdicts use temperature 1");
    }

    GatewayConfig backends = config.backends;
    if (backends.corpus_id.empty()) {
        backends.corpus_id = corpus->corpus_id();
    }
    ServiceState state;
    state.corpus = std::move(corpus);
    state.gateway = std::make_shared<const ModelGateway>(ModelGateway::from_config(backends, index));
    state.index = std::move(index);
    state.scaler = scaler;
    state.retrieval = config.retrieval;
    state.url_template = config.url_template;
    init(std::move(state));
}

void Service::init(ServiceState state)
{
    if (!state.corpus || !state.index || !state.gateway) {
        throw PreconditionError("service state needs a corpus, an index and a gateway");
    }
    state.retrieval.validate();
    auto shared = std::make_shared<const ServiceState>(std::move(state));
    std::lock_guard lock(mutex_);
    state_ = std::move(shared);
}

std::shared_ptr<const ServiceState> Service::snapshot() const
{
    std::lock_guard lock(mutex_);
    return state_;
}

bool Service::ready() const
{
    return snapshot() != nullptr;
}

RetrievalConfig Service::default_retrieval() const
{
    auto s = snapshot();
    return s ? s->retrieval : RetrievalConfig{};
}

VerifyResponse Service::verify(std::string_view claim, std::optional<RetrievalMode> mode,
                               std::optional<std::size_t> k) const
{
    const auto s = snapshot();
    if (!s) {
        throw ServiceError(503, "service is still initializing");
    }
    if (blank(claim)) {
        throw ServiceError(422, "claim must not be empty");
    }
    RetrievalConfig config = s->retrieval;
    if (mode) {
        config.mode = *mode;
    }
    if (k) {
        config.k = *k;
    }
    try {
        config.validate();
    } catch (const PreconditionError &e) {
        throw ServiceError(422, e.what());
    }
    for (Role role : roles_for(config.mode)) {
        if (!s->gateway->configured(role)) {
            throw ServiceError(502, "no " + std::string(to_string(role)) + " backend configured",
                               std::string(to_string(role)));
        }
    }

    const Corpus &corpus = *s->corpus;
    VerifyResponse response;
    response.claim = claim;
    response.mode = config.mode;
    try {
        const auto ranked = retrieve(claim, config, *s->index, corpus, *s->gateway);
        for (const auto &r : ranked) {
            const Paragraph *p = corpus.find(r.para_id);
            if (p == nullptr) {
                log::warn("retrieved id '" + r.para_id + "' is not in the corpus; skipped");
                continue;
            }
            EvidenceResult item;
            item.para_id = p->para_id;
            item.page_id = p->page_id;
            item.page_title = p->page_title;
            item.text = p->text;
            item.retrieval_score = r.score;
            item.verdict = s->scaler.apply(s->gateway->nli(claim, p->text));
            item.highlights = highlight(claim, p->text);
            item.page_url = page_url(s->url_template, p->page_id, p->page_title);
            item.is_lead_section = p->ordinal == 0;
            response.results.push_back(std::move(item));
        }
    } catch (const TransportError &e) {
        throw ServiceError(502, e.what(), e.role());
    } catch (const UnknownCorpusError &e) {
        throw ServiceError(502, e.what(), std::string(to_string(Role::dense)));
    } catch (const PreconditionError &e) {
        throw ServiceError(422, e.what());
    }
    response.results = group_by_page(std::move(response.results),
                                     [](const EvidenceResult &r) { return r.page_id; });
    return response;
}

json Service::get_document(std::string_view page_id) const
{
    const auto s = snapshot();
    if (!s) {
        throw ServiceError(503, "service is still initializing");
    }
    const auto paragraphs = s->corpus->page(page_id);
    if (paragraphs.empty()) {
        throw ServiceError(404, "unknown page '" + std::string(page_id) + "'");
    }
    json items = json::array();
    for (const Paragraph *p : paragraphs) {
        items.push_back(json{{"para_id", p->para_id},
                             {"ordinal", p->ordinal},
                             {"text", p->text},
                             {"is_lead_section", p->ordinal == 0}});
    }
    const std::string &title = paragraphs.front()->page_title;
    return json{{"page_id", page_id},
                {"page_title", title},
                {"page_url", optional_json(page_url(s->url_template, page_id, title))},
                {"paragraphs", items}};
}

json Service::health() const noexcept
{
    try {
        const auto s = snapshot();
        json backends = json::object();
        std::map<Role, bool> reach;
        if (s) {
            reach = s->gateway->reachability();
        }
        for (Role role : all_roles) {
            auto it = reach.find(role);
            backends[std::string(to_string(role))] = it != reach.end() && it->second;
        }
        return json{{"ready", s != nullptr},
                    {"corpus_loaded", s != nullptr},
                    {"index_ready", s != nullptr},
                    {"corpus_id", s ? json(s->corpus->corpus_id()) : json(nullptr)},
                    {"paragraphs", s ? s->corpus->size() : 0},
                    {"backends", backends},
                    {"scaler_T", s ? json(s->scaler.temperature) : json(nullptr)}};
    } catch (...) {
        return json{{"ready", false}, {"error", "health check failed"}};
    }
}

}  // namespace factcheck
