#include <doctest.h>

#include <cmath>
#include <random>

#include "factcheck/calibration.hpp"
#include "factcheck/error.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace factcheck;

namespace {

struct Sample {
    std::vector<NliLogits> logits;
    std::vector<Label> labels;
};

/// Labels drawn from softmax(z); the model reports z * scale.
Sample synthetic(std::uint64_t seed, std::size_t n, double scale)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.5);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    Sample s;
    for (std::size_t i = 0; i < n; ++i) {
        NliLogits z{{normal(rng), normal(rng), normal(rng)}};
        const auto p = softmax(z, 1.0);
        const double u = uniform(rng);
        const std::size_t y = u < p[0] ? 0 : (u < p[0] + p[1] ? 1 : 2);
        s.labels.push_back(all_labels[y]);
        for (double &v : z.values) {
            v *= scale;
        }
        s.logits.push_back(z);
    }
    return s;
}

}  // namespace

TEST_CASE("argmax breaks ties toward the lower index")
{
    CHECK(argmax_label({1.0, 2.0, 0.0}) == Label::refutes);
    CHECK(argmax_label({1.0, 1.0, 1.0}) == Label::supports);
    CHECK(argmax_label({0.0, 3.0, 3.0}) == Label::refutes);
}

TEST_CASE("softmax at T = 1 and in the large-T limit")
{
    const NliLogits z{{2.0, 1.0, -1.0}};
    const auto p = softmax(z, 1.0);
    const double denom = std::exp(2.0) + std::exp(1.0) + std::exp(-1.0);
    CHECK(p[0] == doctest::Approx(std::exp(2.0) / denom).epsilon(1e-12));
    CHECK(p[2] == doctest::Approx(std::exp(-1.0) / denom).epsilon(1e-12));
    const auto flat = softmax(z, 1e6);
    for (double v : flat) {
        CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-5));
    }
    const auto huge = softmax(NliLogits{{1000.0, 0.0, -1000.0}}, 1.0);
    CHECK(huge[0] == doctest::Approx(1.0));
    CHECK_THROWS_AS((void)softmax(NliLogits{{NAN, 0.0, 0.0}}, 1.0), PreconditionError);
    CHECK_THROWS_AS((void)softmax(NliLogits{{INFINITY, 0.0, 0.0}}, 1.0), PreconditionError);
    CHECK_THROWS_AS((void)softmax(z, 0.0), PreconditionError);
}

TEST_CASE("nll agrees with the direct formula")
{
    const auto s = synthetic(1, 200, 1.0);
    for (double t : {0.3, 1.0, 2.5}) {
        CHECK(nll(s.logits, s.labels, t) == doctest::Approx(oracle::nll(s.logits, s.labels, t)).epsilon(1e-10));
    }
}

TEST_CASE("a well-calibrated model fits T near 1")
{
    const auto s = synthetic(2, 20000, 1.0);
    const auto scaler = fit_temperature(s.logits, s.labels);
    CHECK(scaler.temperature == doctest::Approx(1.0).epsilon(0.05));
    CHECK_FALSE(scaler.at_boundary);
    CHECK(scaler.fit_set_size == 20000);
}

TEST_CASE("an overconfident model fits T near its scale")
{
    const auto s = synthetic(3, 20000, 10.0);
    const auto scaler = fit_temperature(s.logits, s.labels);
    CHECK(scaler.temperature == doctest::Approx(10.0).epsilon(0.05));
    CHECK(scaler.fit_nll <= nll(s.logits, s.labels, 1.0));
    CHECK(scaler.fit_nll == doctest::Approx(nll(s.logits, s.labels, scaler.temperature)));
}

TEST_CASE("the fitted temperature matches a dense grid search")
{
    const auto s = synthetic(4, 500, 3.0);
    const auto scaler = fit_temperature(s.logits, s.labels);
    const double lo = std::log(scaler.temperature) - 0.01;
    const double hi = std::log(scaler.temperature) + 0.01;
    const double grid = oracle::grid_argmin(s.logits, s.labels, std::exp(lo), std::exp(hi), 20001);
    CHECK(std::abs(std::log(grid) - std::log(scaler.temperature)) < 2e-6);
    CHECK(scaler.fit_nll <= oracle::nll(s.logits, s.labels, grid) + 1e-12);
}

TEST_CASE("perfectly separable data pushes T to the lower bound")
{
    std::vector<NliLogits> logits{{{5.0, 0.0, 0.0}}, {{0.0, 5.0, 0.0}}, {{0.0, 0.0, 5.0}}};
    std::vector<Label> labels{Label::supports, Label::refutes, Label::nei};
    const auto scaler = fit_temperature(logits, labels);
    CHECK(scaler.at_boundary);
    CHECK(scaler.temperature == doctest::Approx(TemperatureScaler::min_temperature).epsilon(1e-4));
    CHECK_THROWS_AS((void)fit_temperature({}, {}), PreconditionError);
    CHECK_THROWS_AS((void)fit_temperature(logits, std::vector<Label>{Label::nei}), PreconditionError);
}

TEST_CASE("scaling never changes the predicted label")
{
    std::mt19937_64 rng(7);
    std::normal_distribution<double> normal(0.0, 4.0);
    std::uniform_real_distribution<double> temps(-4.6, 4.6);
    for (int i = 0; i < 1000; ++i) {
        const NliLogits z{{normal(rng), normal(rng), normal(rng)}};
        TemperatureScaler scaler;
        scaler.temperature = std::exp(temps(rng));
        const auto verdict = scaler.apply(z);
        CHECK(verdict.label == argmax_label(z.values));
        CHECK(all_labels[oracle::argmax(verdict.probs)] == verdict.label);
        CHECK(verdict.calibrated);
        CHECK(verdict.probs[0] + verdict.probs[1] + verdict.probs[2] == doctest::Approx(1.0));
    }
}

TEST_CASE("scalers and logits round-trip through files")
{
    fixture::TempDir dir;
    TemperatureScaler scaler;
    scaler.temperature = 2.75;
    scaler.fit_nll = 0.61;
    scaler.fit_set_size = 123;
    scaler.save(dir / "T.json");
    const auto loaded = TemperatureScaler::load(dir / "T.json");
    CHECK(loaded.temperature == 2.75);
    CHECK(loaded.fit_nll == 0.61);
    CHECK(loaded.fit_set_size == 123);
    CHECK(scaler.to_json()["T"] == 2.75);

    const std::vector<LogitsRecord> records{{"a", {{1.0, 2.0, 3.0}}, Label::nei},
                                            {"b", {{-1.5, 0.0, 0.25}}, std::nullopt}};
    write_logits(dir / "l.jsonl", records);
    const auto back = read_logits(dir / "l.jsonl");
    REQUIRE(back.size() == 2);
    CHECK(back[0].id == "a");
    CHECK(back[0].logits == records[0].logits);
    CHECK(back[0].label == Label::nei);
    CHECK_FALSE(back[1].label.has_value());
}
