#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "factcheck/jsonl.hpp"
#include "factcheck/label.hpp"
#include "factcheck/model_gateway.hpp"

namespace factcheck {

struct NliVerdict {
    NliLogits logits;
    std::array<double, 3> probs{};
    Label label = Label::nei;
    bool calibrated = false;
};

/// Label of the largest logit; ties go to the lower class index.
[[nodiscard]] Label argmax_label(const std::array<double, 3> &scores) noexcept;

/// softmax(logits / temperature), computed with the max subtracted.
[[nodiscard]] std::array<double, 3> softmax(const NliLogits &logits, double temperature);

/// Mean cross-entropy of softmax(logits / temperature) against `labels`.
[[nodiscard]] double nll(std::span<const NliLogits> logits, std::span<const Label> labels,
                         double temperature);

struct TemperatureScaler {
    double temperature = 1.0;
    double fit_nll = 0.0;
    std::size_t fit_set_size = 0;
    bool at_boundary = false;  // the fitted value sits on a search bound

    static constexpr double min_temperature = 0.01;
    static constexpr double max_temperature = 100.0;
    static constexpr double tolerance = 1e-6;  // on log temperature

    [[nodiscard]] NliVerdict apply(const NliLogits &logits) const;

    [[nodiscard]] json to_json() const;
    [[nodiscard]] static TemperatureScaler from_json(const json &doc);
    void save(const std::filesystem::path &path) const;
    [[nodiscard]] static TemperatureScaler load(const std::filesystem::path &path);
};

/// Golden-section search for the NLL minimizer over log temperature.
[[nodiscard]] TemperatureScaler fit_temperature(std::span<const NliLogits> logits,
                                                std::span<const Label> labels);

/// One line of a logits file: {"id": "...", "logits": [s, r, n], "label": "SUPPORTS"}.
/// "id" and "label" are optional.
struct LogitsRecord {
    std::string id;
    NliLogits logits;
    std::optional<Label> label;
};

[[nodiscard]] std::vector<LogitsRecord> read_logits(const std::filesystem::path &path);
void write_logits(const std::filesystem::path &path, std::span<const LogitsRecord> records);

[[nodiscard]] json to_json(const NliVerdict &verdict);

}  // namespace factcheck
