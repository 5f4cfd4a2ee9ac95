#include "factcheck/pvi.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "factcheck/error.hpp"

namespace factcheck {

double pvi(double p_null, double p_cond)
{
    auto valid = [](double p) { return p > 0.0 && p <= 1.0; };
    if (!valid(p_null) || !valid(p_cond)) {
        throw PreconditionError("PVI probabilities must lie in (0, 1]");
    }
    return -std::log2(p_null) + std::log2(p_cond);
}

namespace {

struct Accumulator {
    double sum = 0.0;
    std::size_t negative = 0;
    std::size_t n = 0;

    void add(double value)
    {
        sum += value;
        negative += value < 0.0 ? 1 : 0;
        ++n;
    }

    [[nodiscard]] PviSummary summary() const
    {
        if (n == 0) {
            return {};
        }
        const auto count = static_cast<double>(n);
        return PviSummary{sum / count, static_cast<double>(negative) / count, n};
    }
};

json summary_json(const PviSummary &s)
{
    return json{{"vui", s.vui}, {"npr", s.npr}, {"n", s.n}};
}

}  // namespace

PviReport analyze(std::span<const PviRecord> records)
{
    if (records.empty()) {
        throw PreconditionError("cannot analyze an empty record set");
    }
    std::array<Accumulator, label_count> per_class{};
    Accumulator total;
    for (const auto &r : records) {
        per_class[index_of(r.label)].add(r.pvi);
        total.add(r.pvi);
    }
    PviReport report;
    for (std::size_t i = 0; i < label_count; ++i) {
        report.per_class[i] = per_class[i].summary();
    }
    report.total = total.summary();
    return report;
}

json PviReport::to_json() const
{
    json doc = json::object();
    for (Label l : all_labels) {
        doc[std::string(to_string(l))] = summary_json(per_class[index_of(l)]);
    }
    doc["total"] = summary_json(total);
    return doc;
}

std::vector<PviRecord> build_records(std::span<const LabeledSample> samples,
                                     std::span<const NliVerdict> null_verdicts,
                                     std::span<const NliVerdict> cond_verdicts)
{
    if (null_verdicts.size() != samples.size() || cond_verdicts.size() != samples.size()) {
        throw PreconditionError("verdict lists are not aligned with the samples (" +
                                std::to_string(samples.size()) + " samples, " +
                                std::to_string(null_verdicts.size()) + " null, " +
                                std::to_string(cond_verdicts.size()) + " conditional)");
    }
    std::vector<PviRecord> out;
    out.reserve(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto &null_v = null_verdicts[i];
        const auto &cond_v = cond_verdicts[i];
        if (!null_v.calibrated || !cond_v.calibrated) {
            throw PreconditionError("sample '" + samples[i].sample_id +
                                    "' has an uncalibrated verdict");
        }
        const std::size_t y = index_of(samples[i].label);
        PviRecord r;
        r.sample_id = samples[i].sample_id;
        r.label = samples[i].label;
        r.p_null = std::clamp(null_v.probs[y], probability_floor, 1.0);
        r.p_cond = std::clamp(cond_v.probs[y], probability_floor, 1.0);
        r.pvi = pvi(r.p_null, r.p_cond);
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<NliLogits> align_logits(std::span<const LabeledSample> samples,
                                    std::span<const LogitsRecord> records)
{
    std::map<std::string_view, const LogitsRecord *> by_id;
    for (const auto &r : records) {
        if (!by_id.emplace(r.id, &r).second) {
            throw PreconditionError("logits id '" + r.id + "' appears twice");
        }
    }
    if (records.size() != samples.size()) {
        throw PreconditionError("logits cover " + std::to_string(records.size()) +
                                " samples, dataset has " + std::to_string(samples.size()));
    }
    std::vector<NliLogits> out;
    out.reserve(samples.size());
    for (const auto &s : samples) {
        auto it = by_id.find(s.sample_id);
        if (it == by_id.end()) {
            throw PreconditionError("no logits for sample '" + s.sample_id + "'");
        }
        out.push_back(it->second->logits);
    }
    return out;
}

}  // namespace factcheck
