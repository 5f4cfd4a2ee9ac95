#include "factcheck/metrics.hpp"

#include <sstream>

#include "factcheck/error.hpp"
#include "factcheck/retrieval.hpp"

namespace factcheck {

namespace {

void require_gold(const GoldEvidence &gold)
{
    if (gold.gold_ids.empty()) {
        throw PreconditionError("claim '" + gold.claim_id + "' has no gold evidence");
    }
}

void require_k(std::size_t k)
{
    if (k == 0) {
        throw PreconditionError("k must be at least 1");
    }
}

void require_aligned(std::span<const Label> preds, std::span<const Label> targets)
{
    if (preds.size() != targets.size()) {
        throw PreconditionError("predictions and targets differ in length");
    }
    if (preds.empty()) {
        throw PreconditionError("no predictions to evaluate");
    }
}

std::array<double, label_count> per_class_f1(const ConfusionMatrix &m)
{
    std::array<double, label_count> out{};
    for (std::size_t c = 0; c < label_count; ++c) {
        std::size_t predicted = 0;
        std::size_t actual = 0;
        for (std::size_t o = 0; o < label_count; ++o) {
            predicted += m[o][c];
            actual += m[c][o];
        }
        const std::size_t tp = m[c][c];
        out[c] = tp == 0 ? 0.0
                         : 2.0 * static_cast<double>(tp) /
                               static_cast<double>(predicted + actual);
    }
    return out;
}

std::string format_k_list(const std::map<std::size_t, double> &values, const std::string &metric)
{
    std::ostringstream out;
    for (const auto &[k, v] : values) {
        out << metric << "@" << k << "," << v << "\n";
    }
    return out.str();
}

}  // namespace

double mrr_at_k(std::span<const RankedEvidence> results, const GoldEvidence &gold, std::size_t k)
{
    require_gold(gold);
    require_k(k);
    std::size_t best = 0;
    for (const auto &r : results) {
        if (r.rank >= 1 && r.rank <= k && gold.gold_ids.contains(r.para_id) &&
            (best == 0 || r.rank < best)) {
            best = r.rank;
        }
    }
    return best == 0 ? 0.0 : 1.0 / static_cast<double>(best);
}

double precision_at_k(std::span<const RankedEvidence> results, const GoldEvidence &gold,
                      std::size_t k)
{
    require_gold(gold);
    require_k(k);
    std::size_t hits = 0;
    for (const auto &r : results) {
        if (r.rank >= 1 && r.rank <= k && gold.gold_ids.contains(r.para_id)) {
            ++hits;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(k);
}

ConfusionMatrix confusion_matrix(std::span<const Label> preds, std::span<const Label> targets)
{
    require_aligned(preds, targets);
    ConfusionMatrix m{};
    for (std::size_t i = 0; i < preds.size(); ++i) {
        ++m[index_of(targets[i])][index_of(preds[i])];
    }
    return m;
}

double f1_macro(std::span<const Label> preds, std::span<const Label> targets)
{
    const auto f1 = per_class_f1(confusion_matrix(preds, targets));
    double sum = 0.0;
    for (double v : f1) {
        sum += v;
    }
    return sum / static_cast<double>(label_count);
}

RetrievalReport evaluate_retrieval(const ResultLists &results, std::span<const GoldEvidence> gold,
                                   std::span<const std::size_t> ks)
{
    if (gold.empty()) {
        throw PreconditionError("no gold claims to evaluate");
    }
    RetrievalReport report;
    report.claims = gold.size();
    for (std::size_t k : ks) {
        require_k(k);
        double mrr_sum = 0.0;
        double p_sum = 0.0;
        for (const auto &g : gold) {
            auto it = results.find(g.claim_id);
            if (it == results.end()) {
                require_gold(g);
                continue;
            }
            mrr_sum += mrr_at_k(it->second, g, k);
            p_sum += precision_at_k(it->second, g, k);
        }
        const auto n = static_cast<double>(gold.size());
        report.mrr[k] = mrr_sum / n;
        report.precision[k] = p_sum / n;
    }
    return report;
}

json RetrievalReport::to_json() const
{
    json mrr_j = json::object();
    json p_j = json::object();
    for (const auto &[k, v] : mrr) {
        mrr_j[std::to_string(k)] = v;
    }
    for (const auto &[k, v] : precision) {
        p_j[std::to_string(k)] = v;
    }
    return json{{"claims", claims}, {"mrr", mrr_j}, {"precision", p_j}};
}

std::string RetrievalReport::to_csv() const
{
    return "metric,value\n" + format_k_list(mrr, "MRR") + format_k_list(precision, "P");
}

ClassificationReport evaluate_classification(std::span<const Label> preds,
                                             std::span<const Label> targets)
{
    ClassificationReport r;
    r.confusion = confusion_matrix(preds, targets);
    r.n = preds.size();
    r.per_class_f1 = per_class_f1(r.confusion);
    double sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t c = 0; c < label_count; ++c) {
        sum += r.per_class_f1[c];
        correct += r.confusion[c][c];
    }
    r.f1_macro = sum / static_cast<double>(label_count);
    r.accuracy = static_cast<double>(correct) / static_cast<double>(r.n);
    return r;
}

json ClassificationReport::to_json() const
{
    json f1 = json::object();
    json confusion_j = json::object();
    for (Label t : all_labels) {
        f1[std::string(to_string(t))] = per_class_f1[index_of(t)];
        json row = json::object();
        for (Label p : all_labels) {
            row[std::string(to_string(p))] = confusion[index_of(t)][index_of(p)];
        }
        confusion_j[std::string(to_string(t))] = row;
    }
    return json{{"n", n},
                {"f1_macro", f1_macro},
                {"accuracy", accuracy},
                {"per_class_f1", f1},
                {"confusion", confusion_j}};
}

std::string ClassificationReport::to_csv() const
{
    std::ostringstream out;
    out << "metric,value\nF1_macro," << f1_macro << "\naccuracy," << accuracy << "\n";
    for (Label l : all_labels) {
        out << "F1_" << to_string(l) << "," << per_class_f1[index_of(l)] << "\n";
    }
    return out.str();
}

std::vector<GoldEvidence> read_gold(const std::filesystem::path &path)
{
    std::vector<GoldEvidence> out;
    read_jsonl(path, [&out](const json &r, std::size_t) {
        GoldEvidence g;
        g.claim_id = r.at("claim_id").get<std::string>();
        for (const auto &id : r.at("gold_ids")) {
            g.gold_ids.insert(id.get<std::string>());
        }
        out.push_back(std::move(g));
    });
    return out;
}

ResultLists read_result_lists(const std::filesystem::path &path)
{
    ResultLists out;
    read_jsonl(path, [&out](const json &r, std::size_t) {
        auto &list = out[r.at("claim_id").get<std::string>()];
        for (const auto &e : r.at("results")) {
            list.push_back(ranked_evidence_from_json(e));
        }
    });
    return out;
}

}  // namespace factcheck
