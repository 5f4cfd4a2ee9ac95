#include "factcheck/nway.hpp"

#include <algorithm>
#include <atomic>
#include <optional>
#include <set>
#include <thread>
#include <variant>

#include "factcheck/error.hpp"
#include "factcheck/log.hpp"

namespace factcheck {

namespace {

using Outcome = std::variant<std::monostate, NwayTuple, TupleError>;

Outcome tuple_for(const Claim &claim, const InvertedIndex &index, const TupleOptions &options)
{
    if (!index.contains(claim.source_para_id)) {
        return TupleError{claim.claim_id,
                          "source paragraph '" + claim.source_para_id + "' is not indexed"};
    }
    NwayTuple t;
    t.claim_id = claim.claim_id;
    t.claim_text = claim.text;
    t.positive = claim.source_para_id;
    const std::size_t wanted = options.n - 1;
    for (const auto &hit : index.search(claim.text, options.n, options.params)) {
        if (hit.para_id != t.positive && t.negatives.size() < wanted) {
            t.negatives.push_back(hit.para_id);
        }
    }
    if (t.negatives.size() < wanted) {
        t.is_short = true;
        log::warn("tuple for " + claim.claim_id + " has only " +
                  std::to_string(t.negatives.size()) + " of " + std::to_string(wanted) +
                  " negatives");
    }
    return t;
}

}  // namespace

TupleResult build_tuples(std::span<const Claim> claims, const InvertedIndex &index,
                         const TupleOptions &options)
{
    if (options.n < 2) {
        throw PreconditionError("n-way tuples need n >= 2");
    }
    options.params.validate();

    std::vector<const Claim *> eligible;
    std::set<std::string_view> seen;
    for (const auto &c : claims) {
        if (c.label != Label::nei && seen.insert(c.text).second) {
            eligible.push_back(&c);
        }
    }

    std::vector<Outcome> outcomes(eligible.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < eligible.size(); i = next++) {
            outcomes[i] = tuple_for(*eligible[i], index, options);
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

    TupleResult out;
    for (auto &o : outcomes) {
        if (auto *t = std::get_if<NwayTuple>(&o)) {
            out.tuples.push_back(std::move(*t));
        } else if (auto *e = std::get_if<TupleError>(&o)) {
            out.errors.push_back(std::move(*e));
        }
    }
    return out;
}

json to_json(const NwayTuple &tuple)
{
    return json{{"claim_id", tuple.claim_id},
                {"claim", tuple.claim_text},
                {"positive", tuple.positive},
                {"negatives", tuple.negatives}};
}

void save_tuples(const std::filesystem::path &path, std::span<const NwayTuple> tuples)
{
    JsonlWriter out(path);
    for (const auto &t : tuples) {
        out.write(to_json(t));
    }
    out.close();
}

}  // namespace factcheck
