#include "factcheck/qacg.hpp"

#include <algorithm>
#include <atomic>
#include <set>
#include <thread>

#include "factcheck/error.hpp"
#include "factcheck/log.hpp"
#include "factcheck/random.hpp"

namespace factcheck {

std::string_view to_string(Split split)
{
    switch (split) {
    case Split::train:
        return "train";
    case Split::dev:
        return "dev";
    case Split::test:
        return "test";
    }
    return "?";
}

Split parse_split(std::string_view text)
{
    for (Split s : all_splits) {
        if (to_string(s) == text) {
            return s;
        }
    }
    throw FormatError("unknown split '" + std::string(text) + "'");
}

// ---- claims -----------------------------------------------------------------

void validate_claim(const Claim &claim)
{
    const auto &t = claim.trace;
    auto fail = [&claim](const std::string &why) {
        throw FormatError("claim '" + claim.claim_id + "': " + why);
    };
    switch (claim.label) {
    case Label::supports:
        if (t.substituted_entity || !t.aux_para_ids.empty()) {
            fail("SUPPORTS trace must not carry a substitute or auxiliary paragraphs");
        }
        break;
    case Label::refutes:
        if (!t.substituted_entity) {
            fail("REFUTES trace lacks the substituted entity");
        }
        if (t.substituted_entity->type != t.answer_entity.type ||
            t.substituted_entity->text == t.answer_entity.text) {
            fail("REFUTES substitute must share the type and differ in text");
        }
        break;
    case Label::nei:
        if (t.aux_para_ids.empty()) {
            fail("NEI trace lacks auxiliary paragraphs");
        }
        if (std::find(t.aux_para_ids.begin(), t.aux_para_ids.end(), claim.source_para_id) !=
            t.aux_para_ids.end()) {
            fail("NEI auxiliary paragraph equals the source paragraph");
        }
        break;
    }
}

namespace {

json entity_json(const Entity &e)
{
    return json{{"text", e.text}, {"type", e.type}, {"start", e.start}, {"end", e.end}};
}

Entity entity_from_json(const json &j)
{
    return Entity{j.at("text").get<std::string>(), j.at("type").get<std::string>(),
                  j.at("start").get<std::size_t>(), j.at("end").get<std::size_t>()};
}

}  // namespace

json to_json(const Claim &claim)
{
    return json{{"claim_id", claim.claim_id},
                {"text", claim.text},
                {"label", to_string(claim.label)},
                {"language", claim.language},
                {"source_para_id", claim.source_para_id},
                {"trace",
                 {{"answer_entity", entity_json(claim.trace.answer_entity)},
                  {"substituted_entity", claim.trace.substituted_entity
                                             ? entity_json(*claim.trace.substituted_entity)
                                             : json(nullptr)},
                  {"question", claim.trace.question},
                  {"aux_para_ids", claim.trace.aux_para_ids}}}};
}

Claim claim_from_json(const json &r)
{
    Claim c;
    c.claim_id = r.at("claim_id").get<std::string>();
    c.text = r.at("text").get<std::string>();
    c.label = parse_label(r.at("label").get<std::string>());
    c.language = r.value("language", std::string{});
    c.source_para_id = r.at("source_para_id").get<std::string>();
    if (r.contains("trace")) {
        const auto &t = r.at("trace");
        c.trace.answer_entity = entity_from_json(t.at("answer_entity"));
        if (t.contains("substituted_entity") && !t.at("substituted_entity").is_null()) {
            c.trace.substituted_entity = entity_from_json(t.at("substituted_entity"));
        }
        c.trace.question = t.value("question", std::string{});
        c.trace.aux_para_ids = t.value("aux_para_ids", std::vector<std::string>{});
    }
    return c;
}

LabelCounts ClaimDataset::label_counts(Split split) const
{
    LabelCounts counts{};
    auto it = splits.find(split);
    if (it != splits.end()) {
        for (const auto &c : it->second) {
            ++counts[index_of(c.label)];
        }
    }
    return counts;
}

std::size_t ClaimDataset::size() const
{
    std::size_t n = 0;
    for (const auto &[split, claims] : splits) {
        n += claims.size();
    }
    return n;
}

std::size_t ClaimDataset::size(Split split) const
{
    auto it = splits.find(split);
    return it == splits.end() ? 0 : it->second.size();
}

void ClaimDataset::save_jsonl(const std::filesystem::path &path) const
{
    JsonlWriter out(path);
    for (const auto &[split, claims] : splits) {
        for (const auto &c : claims) {
            json record = to_json(c);
            record["split"] = to_string(split);
            out.write(record);
        }
    }
    out.close();
}

ClaimDataset ClaimDataset::load_jsonl(const std::filesystem::path &path, std::string name)
{
    ClaimDataset ds;
    ds.name = name.empty() ? path.stem().string() : std::move(name);
    read_jsonl(path, [&ds](const json &r, std::size_t) {
        const Split split = parse_split(r.value("split", std::string("train")));
        Claim c = claim_from_json(r);
        validate_claim(c);
        ds.splits[split].push_back(std::move(c));
    });
    return ds;
}

std::vector<std::string> unresolved_sources(const ClaimDataset &dataset, const Corpus &corpus)
{
    std::vector<std::string> out;
    for (const auto &[split, claims] : dataset.splits) {
        for (const auto &c : claims) {
            if (corpus.find(c.source_para_id) == nullptr) {
                out.push_back(c.claim_id);
            }
        }
    }
    return out;
}

// ---- generation -------------------------------------------------------------

std::vector<SampledParagraph> sample_source_paragraphs(const Corpus &corpus, std::size_t n_train,
                                                       std::size_t n_dev, std::size_t n_test,
                                                       std::uint64_t seed)
{
    const std::size_t total = n_train + n_dev + n_test;
    if (total > corpus.size()) {
        throw PreconditionError("cannot sample " + std::to_string(total) +
                                " paragraphs from a corpus of " + std::to_string(corpus.size()));
    }
    Rng rng(seed);
    const auto picks = rng.sample(corpus.size(), total);
    std::vector<SampledParagraph> out;
    out.reserve(total);
    for (std::size_t i = 0; i < picks.size(); ++i) {
        const Split split = i < n_train ? Split::train
                            : i < n_train + n_dev ? Split::dev
                                                  : Split::test;
        out.push_back(SampledParagraph{split, &corpus.paragraphs()[picks[i]]});
    }
    return out;
}

namespace {

std::string claim_id(const Paragraph &p, char tag, std::size_t j)
{
    return p.para_id + "/" + tag + std::to_string(j);
}

void record_issue(GenerationLog &log, const Paragraph &p, std::string stage, std::string entity,
                  const std::exception &e)
{
    log::warn(stage + " generation failed for " + p.para_id +
              (entity.empty() ? std::string{} : " entity '" + entity + "'") + ": " + e.what());
    log.push_back(GenerationIssue{p.para_id, std::move(stage), std::move(entity), e.what()});
}

}  // namespace

std::vector<Claim> gen_supports(const Paragraph &p, std::span<const Entity> entities,
                                const ModelGateway &gw, std::string_view language,
                                GenerationLog &log)
{
    std::vector<Claim> out;
    for (std::size_t j = 0; j < entities.size(); ++j) {
        const Entity &answer = entities[j];
        try {
            Claim c;
            c.trace.answer_entity = answer;
            c.trace.question = gw.generate_question(answer, p.text);
            c.text = gw.generate_claim(answer.text, c.trace.question);
            c.claim_id = claim_id(p, 'S', j);
            c.label = Label::supports;
            c.language = language;
            c.source_para_id = p.para_id;
            out.push_back(std::move(c));
        } catch (const Error &e) {
            record_issue(log, p, "supports", answer.text, e);
        }
    }
    return out;
}

std::vector<Claim> gen_supports(const Paragraph &p, const ModelGateway &gw,
                                std::string_view language, GenerationLog &log)
{
    std::vector<Entity> entities;
    try {
        entities = gw.ner(p.text);
    } catch (const Error &e) {
        record_issue(log, p, "ner", {}, e);
        return {};
    }
    return gen_supports(p, entities, gw, language, log);
}

std::vector<Claim> gen_refutes(const Paragraph &p, std::span<const Claim> supports,
                               std::span<const Entity> entities, const ModelGateway &gw,
                               std::uint64_t seed, GenerationLog &log)
{
    Rng rng(derive_seed(seed, p.para_id + "/refutes"));
    std::vector<Claim> out;
    for (std::size_t j = 0; j < supports.size(); ++j) {
        const Claim &source = supports[j];
        const Entity &answer = source.trace.answer_entity;
        std::vector<const Entity *> candidates;
        for (const auto &e : entities) {
            if (e.type == answer.type && e.text != answer.text) {
                candidates.push_back(&e);
            }
        }
        if (candidates.empty()) {
            continue;
        }
        const Entity &substitute = *candidates[rng.index(candidates.size())];
        try {
            Claim c;
            c.text = gw.generate_claim(substitute.text, source.trace.question);
            c.claim_id = claim_id(p, 'R', j);
            c.label = Label::refutes;
            c.language = source.language;
            c.source_para_id = p.para_id;
            c.trace.answer_entity = answer;
            c.trace.substituted_entity = substitute;
            c.trace.question = source.trace.question;
            out.push_back(std::move(c));
        } catch (const Error &e) {
            record_issue(log, p, "refutes", answer.text, e);
        }
    }
    return out;
}

std::vector<Claim> gen_nei(const Paragraph &p, std::span<const Entity> entities,
                           const Corpus &corpus, const ModelGateway &gw, std::size_t aux_count,
                           std::uint64_t seed, GenerationLog &log)
{
    std::vector<const Paragraph *> others;
    for (const Paragraph *q : corpus.page(p.page_id)) {
        if (q->para_id != p.para_id) {
            others.push_back(q);
        }
    }
    const std::size_t m = std::min(others.size(), aux_count);
    if (m == 0) {
        return {};
    }
    Rng rng(derive_seed(seed, p.para_id + "/nei"));
    std::vector<const Paragraph *> aux;
    for (std::size_t i : rng.sample(others.size(), m)) {
        aux.push_back(others[i]);
    }
    std::sort(aux.begin(), aux.end(),
              [](const Paragraph *a, const Paragraph *b) { return a->ordinal < b->ordinal; });

    auto in_source = [&entities](const Entity &e) {
        return std::any_of(entities.begin(), entities.end(),
                           [&e](const Entity &s) { return s.same_identity(e); });
    };

    // A'_i: union over auxiliaries, minus A_i, first occurrence wins.
    std::vector<std::pair<Entity, const Paragraph *>> answers;
    for (const Paragraph *q : aux) {
        std::vector<Entity> found;
        try {
            found = gw.ner(q->text);
        } catch (const Error &e) {
            record_issue(log, p, "nei", {}, e);
            continue;
        }
        for (auto &e : found) {
            const bool seen = std::any_of(answers.begin(), answers.end(),
                                          [&e](const auto &a) { return a.first.same_identity(e); });
            if (!seen && !in_source(e)) {
                answers.emplace_back(std::move(e), q);
            }
        }
    }

    std::vector<Claim> out;
    for (std::size_t j = 0; j < answers.size(); ++j) {
        const auto &[answer, q] = answers[j];
        const bool aux_first = q->ordinal < p.ordinal;
        const std::string context = aux_first ? q->text + "\n" + p.text : p.text + "\n" + q->text;
        try {
            Claim c;
            c.trace.answer_entity = answer;
            c.trace.question = gw.generate_question(answer, context);
            c.trace.aux_para_ids = {q->para_id};
            c.text = gw.generate_claim(answer.text, c.trace.question);
            c.claim_id = claim_id(p, 'N', j);
            c.label = Label::nei;
            c.language = corpus.language();
            c.source_para_id = p.para_id;
            out.push_back(std::move(c));
        } catch (const Error &e) {
            record_issue(log, p, "nei", answer.text, e);
        }
    }
    return out;
}

ParagraphClaims generate_for_paragraph(const Paragraph &p, const Corpus &corpus,
                                       const ModelGateway &gw, std::size_t aux_count,
                                       std::uint64_t seed, GenerationLog &log)
{
    ParagraphClaims out;
    std::vector<Entity> entities;
    try {
        entities = gw.ner(p.text);
    } catch (const Error &e) {
        record_issue(log, p, "ner", {}, e);
        return out;
    }
    out.supports = gen_supports(p, entities, gw, corpus.language(), log);
    out.refutes = gen_refutes(p, out.supports, entities, gw, seed, log);
    out.nei = gen_nei(p, entities, corpus, gw, aux_count, seed, log);
    return out;
}

GenerationResult generate_dataset(const Corpus &corpus, const ModelGateway &gw,
                                  const GenerateOptions &options)
{
    const auto sampled = sample_source_paragraphs(corpus, options.n_train, options.n_dev,
                                                  options.n_test, options.seed);
    std::vector<ParagraphClaims> results(sampled.size());
    std::vector<GenerationLog> logs(sampled.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < sampled.size(); i = next++) {
            results[i] = generate_for_paragraph(*sampled[i].paragraph, corpus, gw,
                                                options.aux_count, options.seed, logs[i]);
        }
    };
    const std::size_t threads = std::max<std::size_t>(1, options.threads);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
    }

    GenerationResult out;
    out.dataset.name = options.name;
    for (Split s : all_splits) {
        out.dataset.splits[s];
    }
    for (std::size_t i = 0; i < sampled.size(); ++i) {
        auto &dest = out.dataset.splits[sampled[i].split];
        for (auto *group : {&results[i].supports, &results[i].refutes, &results[i].nei}) {
            std::move(group->begin(), group->end(), std::back_inserter(dest));
        }
        std::move(logs[i].begin(), logs[i].end(), std::back_inserter(out.log));
    }
    return out;
}

// ---- dataset assembly -------------------------------------------------------

std::vector<Claim> dedup_claims(std::span<const Claim> claims)
{
    std::set<std::string_view> seen;
    std::vector<Claim> out;
    for (const auto &c : claims) {
        if (seen.insert(c.text).second) {
            out.push_back(c);
        }
    }
    return out;
}

ClaimDataset dedup_dataset(const ClaimDataset &dataset)
{
    ClaimDataset out;
    out.name = dataset.name;
    std::set<std::string_view> seen;
    for (const auto &[split, claims] : dataset.splits) {
        auto &dest = out.splits[split];
        for (const auto &c : claims) {
            if (seen.insert(c.text).second) {
                dest.push_back(c);
            }
        }
    }
    return out;
}

ClaimDataset stratify_balance(const ClaimDataset &dataset, std::uint64_t seed)
{
    ClaimDataset out;
    out.name = dataset.name;
    for (const auto &[split, claims] : dataset.splits) {
        std::array<std::vector<std::size_t>, label_count> by_label;
        for (std::size_t i = 0; i < claims.size(); ++i) {
            by_label[index_of(claims[i].label)].push_back(i);
        }
        std::size_t target = claims.size();
        for (Label l : all_labels) {
            if (by_label[index_of(l)].empty()) {
                throw PreconditionError("split '" + std::string(to_string(split)) +
                                        "' has no " + std::string(to_string(l)) + " claims");
            }
            target = std::min(target, by_label[index_of(l)].size());
        }
        std::vector<bool> keep(claims.size(), false);
        for (Label l : all_labels) {
            const auto &members = by_label[index_of(l)];
            Rng rng(derive_seed(seed, std::string(to_string(split)) + "/" +
                                          std::string(to_string(l))));
            for (std::size_t pick : rng.sample(members.size(), target)) {
                keep[members[pick]] = true;
            }
        }
        auto &dest = out.splits[split];
        for (std::size_t i = 0; i < claims.size(); ++i) {
            if (keep[i]) {
                dest.push_back(claims[i]);
            }
        }
    }
    return out;
}

namespace {

void check_compatible(std::span<const ClaimDataset> datasets)
{
    if (datasets.size() < 2) {
        throw PreconditionError("need at least two datasets");
    }
    std::set<std::string> names;
    for (const auto &ds : datasets) {
        if (!names.insert(ds.name).second) {
            throw PreconditionError("dataset name '" + ds.name +
                                    "' used twice; names namespace the claim ids");
        }
        if (ds.splits.size() != datasets.front().splits.size() ||
            !std::equal(ds.splits.begin(), ds.splits.end(), datasets.front().splits.begin(),
                        [](const auto &a, const auto &b) { return a.first == b.first; })) {
            throw PreconditionError("dataset '" + ds.name + "' has a different split layout than '" +
                                    datasets.front().name + "'");
        }
    }
}

Claim namespaced(const Claim &c, const std::string &source)
{
    Claim out = c;
    out.claim_id = source + ":" + c.claim_id;
    return out;
}

}  // namespace

ClaimDataset build_sum(std::span<const ClaimDataset> datasets)
{
    check_compatible(datasets);
    ClaimDataset out;
    out.name = "sum";
    for (const auto &ds : datasets) {
        for (const auto &[split, claims] : ds.splits) {
            auto &dest = out.splits[split];
            for (const auto &c : claims) {
                dest.push_back(namespaced(c, ds.name));
            }
        }
    }
    return out;
}

ClaimDataset build_mix(std::span<const ClaimDataset> datasets, std::uint64_t seed)
{
    check_compatible(datasets);
    ClaimDataset out;
    out.name = "mix";
    const ClaimDataset &shape = datasets.front();
    for (const auto &[split, template_claims] : shape.splits) {
        const LabelCounts target = shape.label_counts(split);
        std::array<std::vector<std::pair<const Claim *, const std::string *>>, label_count> pool;
        for (const auto &ds : datasets) {
            for (const auto &c : ds.splits.at(split)) {
                pool[index_of(c.label)].emplace_back(&c, &ds.name);
            }
        }
        auto &dest = out.splits[split];
        for (Label l : all_labels) {
            auto &members = pool[index_of(l)];
            Rng rng(derive_seed(seed, "mix/" + std::string(to_string(split)) + "/" +
                                          std::string(to_string(l))));
            auto picks = rng.sample(members.size(), target[index_of(l)]);
            std::sort(picks.begin(), picks.end());
            for (std::size_t pick : picks) {
                dest.push_back(namespaced(*members[pick].first, *members[pick].second));
            }
        }
    }
    return out;
}

}  // namespace factcheck
