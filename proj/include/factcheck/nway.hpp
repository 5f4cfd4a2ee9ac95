#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "factcheck/lexical_index.hpp"
#include "factcheck/qacg.hpp"

namespace factcheck {

/// One claim with its gold paragraph and the lexical hard negatives that
/// outrank everything else, in decreasing score order.
struct NwayTuple {
    std::string claim_id;
    std::string claim_text;
    std::string positive;
    std::vector<std::string> negatives;
    bool is_short = false;  // fewer than n - 1 negatives were available
};

struct TupleError {
    std::string claim_id;
    std::string message;
};

struct TupleOptions {
    std::size_t n = 32;
    Bm25Params params = Bm25Params::full_text();
    std::size_t threads = 1;
};

struct TupleResult {
    std::vector<NwayTuple> tuples;
    std::vector<TupleError> errors;
};

/// SUPPORTS and REFUTES claims only; repeated claim texts yield a single
/// tuple. Output follows input order.
[[nodiscard]] TupleResult build_tuples(std::span<const Claim> claims, const InvertedIndex &index,
                                       const TupleOptions &options = {});

[[nodiscard]] json to_json(const NwayTuple &tuple);
void save_tuples(const std::filesystem::path &path, std::span<const NwayTuple> tuples);

}  // namespace factcheck
