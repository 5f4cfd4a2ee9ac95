#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "factcheck/calibration.hpp"
#include "factcheck/jsonl.hpp"
#include "factcheck/label.hpp"

namespace factcheck {

/// Information in bits that the input adds about the true label:
/// log2(p_cond) - log2(p_null). Both probabilities must lie in (0, 1].
[[nodiscard]] double pvi(double p_null, double p_cond);

struct PviRecord {
    std::string sample_id;
    Label label = Label::supports;
    double p_null = 1.0;
    double p_cond = 1.0;
    double pvi = 0.0;
};

struct PviSummary {
    double vui = 0.0;  // mean PVI
    double npr = 0.0;  // fraction of records with negative PVI
    std::size_t n = 0;
};

struct PviReport {
    std::array<PviSummary, label_count> per_class{};
    PviSummary total;

    [[nodiscard]] json to_json() const;
};

[[nodiscard]] PviReport analyze(std::span<const PviRecord> records);

/// Probability floor applied before taking logarithms.
inline constexpr double probability_floor = 1e-12;

struct LabeledSample {
    std::string sample_id;
    Label label;
};

/// Pairs each sample with its null-model and input-aware verdicts, which must
/// be calibrated and listed in the same order as `samples`.
[[nodiscard]] std::vector<PviRecord> build_records(std::span<const LabeledSample> samples,
                                                   std::span<const NliVerdict> null_verdicts,
                                                   std::span<const NliVerdict> cond_verdicts);

/// Reorders `records` to follow `samples` by id. Throws when an id is
/// missing, repeated, or unknown.
[[nodiscard]] std::vector<NliLogits> align_logits(std::span<const LabeledSample> samples,
                                                  std::span<const LogitsRecord> records);

}  // namespace factcheck
