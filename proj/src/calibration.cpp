#include "factcheck/calibration.hpp"

#include <cmath>

#include "factcheck/error.hpp"
#include "factcheck/log.hpp"

namespace factcheck {

namespace {

void require_finite(const NliLogits &logits)
{
    for (double v : logits.values) {
        if (!std::isfinite(v)) {
            throw PreconditionError("non-finite NLI logit");
        }
    }
}

void require_temperature(double temperature)
{
    if (!(temperature > 0.0) || !std::isfinite(temperature)) {
        throw PreconditionError("temperature must be a positive finite number");
    }
}

}  // namespace

Label argmax_label(const std::array<double, 3> &scores) noexcept
{
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) {
        if (scores[i] > scores[best]) {
            best = i;
        }
    }
    return all_labels[best];
}

std::array<double, 3> softmax(const NliLogits &logits, double temperature)
{
    require_temperature(temperature);
    require_finite(logits);
    std::array<double, 3> scaled{};
    double top = -INFINITY;
    for (std::size_t i = 0; i < 3; ++i) {
        scaled[i] = logits.values[i] / temperature;
        top = std::max(top, scaled[i]);
    }
    double total = 0.0;
    for (double &v : scaled) {
        v = std::exp(v - top);
        total += v;
    }
    for (double &v : scaled) {
        v /= total;
    }
    return scaled;
}

double nll(std::span<const NliLogits> logits, std::span<const Label> labels, double temperature)
{
    if (logits.size() != labels.size()) {
        throw PreconditionError("logits and labels differ in length");
    }
    if (logits.empty()) {
        throw PreconditionError("empty validation set");
    }
    require_temperature(temperature);
    double sum = 0.0;
    for (std::size_t n = 0; n < logits.size(); ++n) {
        const auto &z = logits[n].values;
        double top = -INFINITY;
        for (double v : z) {
            top = std::max(top, v / temperature);
        }
        double total = 0.0;
        for (double v : z) {
            total += std::exp(v / temperature - top);
        }
        sum += top + std::log(total) - z[index_of(labels[n])] / temperature;
    }
    return sum / static_cast<double>(logits.size());
}

TemperatureScaler fit_temperature(std::span<const NliLogits> logits, std::span<const Label> labels)
{
    if (logits.empty()) {
        throw PreconditionError("cannot fit a temperature on an empty validation set");
    }
    if (logits.size() != labels.size()) {
        throw PreconditionError("logits and labels differ in length");
    }
    for (const auto &z : logits) {
        require_finite(z);
    }

    const double lo_bound = std::log(TemperatureScaler::min_temperature);
    const double hi_bound = std::log(TemperatureScaler::max_temperature);
    auto objective = [&](double log_t) { return nll(logits, labels, std::exp(log_t)); };

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo_bound;
    double b = hi_bound;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = objective(c);
    double fd = objective(d);
    while (b - a > TemperatureScaler::tolerance) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d);
        }
    }

    TemperatureScaler scaler;
    const double log_t = (a + b) / 2.0;
    scaler.temperature = std::exp(log_t);
    scaler.fit_nll = objective(log_t);
    scaler.fit_set_size = logits.size();
    const double edge = 10.0 * TemperatureScaler::tolerance;
    scaler.at_boundary = log_t - lo_bound < edge || hi_bound - log_t < edge;
    if (scaler.at_boundary) {
        log::warn("fitted temperature " + std::to_string(scaler.temperature) +
                  " lies on the search boundary");
    }
    return scaler;
}

NliVerdict TemperatureScaler::apply(const NliLogits &logits) const
{
    NliVerdict v;
    v.logits = logits;
    v.probs = softmax(logits, temperature);
    v.label = argmax_label(logits.values);
    v.calibrated = true;
    return v;
}

json TemperatureScaler::to_json() const
{
    return json{{"T", temperature}, {"fit_nll", fit_nll}, {"fit_set_size", fit_set_size}};
}

TemperatureScaler TemperatureScaler::from_json(const json &doc)
{
    TemperatureScaler s;
    try {
        s.temperature = doc.at("T").get<double>();
        s.fit_nll = doc.value("fit_nll", 0.0);
        s.fit_set_size = doc.value("fit_set_size", std::size_t{0});
    } catch (const json::exception &e) {
        throw FormatError(std::string("bad scaler document: ") + e.what());
    }
    if (!(s.temperature > 0.0) || !std::isfinite(s.temperature)) {
        throw FormatError("scaler temperature must be positive");
    }
    return s;
}

void TemperatureScaler::save(const std::filesystem::path &path) const
{
    write_json_file(path, to_json());
}

TemperatureScaler TemperatureScaler::load(const std::filesystem::path &path)
{
    return from_json(read_json_file(path));
}

std::vector<LogitsRecord> read_logits(const std::filesystem::path &path)
{
    std::vector<LogitsRecord> out;
    read_jsonl(path, [&out, &path](const json &r, std::size_t line) {
        LogitsRecord rec;
        rec.id = r.value("id", std::string{});
        const auto &values = r.at("logits");
        if (!values.is_array() || values.size() != 3) {
            throw FormatError(path.string() + ":" + std::to_string(line) +
                              ": logits must be an array of three numbers");
        }
        for (std::size_t i = 0; i < 3; ++i) {
            rec.logits.values[i] = values[i].get<double>();
        }
        if (r.contains("label") && !r.at("label").is_null()) {
            rec.label = parse_label(r.at("label").get<std::string>());
        }
        out.push_back(std::move(rec));
    });
    return out;
}

void write_logits(const std::filesystem::path &path, std::span<const LogitsRecord> records)
{
    JsonlWriter out(path);
    for (const auto &r : records) {
        json j{{"id", r.id}, {"logits", r.logits.values}};
        if (r.label) {
            j["label"] = to_string(*r.label);
        }
        out.write(j);
    }
    out.close();
}

json to_json(const NliVerdict &verdict)
{
    return json{{"logits", verdict.logits.values},
                {"probs", verdict.probs},
                {"label", to_string(verdict.label)},
                {"calibrated", verdict.calibrated}};
}

}  // namespace factcheck
