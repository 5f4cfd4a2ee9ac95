#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "factcheck/text.hpp"

namespace oracle {

std::vector<std::vector<std::string>> tokenize_all(const std::vector<Doc> &docs)
{
    std::vector<std::vector<std::string>> tokens;
    for (const auto &d : docs) {
        tokens.push_back(factcheck::tokenize(d.text));
    }
    return tokens;
}

std::vector<std::pair<std::string, double>> bm25_rank(const std::vector<Doc> &docs,
                                                      const std::string &query,
                                                      const factcheck::Bm25Params &params)
{
    return bm25_rank(docs, tokenize_all(docs), query, params);
}

std::vector<std::pair<std::string, double>> bm25_rank(
    const std::vector<Doc> &docs, const std::vector<std::vector<std::string>> &tokens,
    const std::string &query, const factcheck::Bm25Params &params)
{
    double total_len = 0.0;
    for (const auto &t : tokens) {
        total_len += static_cast<double>(t.size());
    }
    const double n = static_cast<double>(docs.size());
    const double avg = docs.empty() ? 0.0 : total_len / n;

    std::vector<std::string> terms;
    for (const auto &t : factcheck::tokenize(query)) {
        if (std::find(terms.begin(), terms.end(), t) == terms.end()) {
            terms.push_back(t);
        }
    }

    std::vector<double> dfs;
    for (const auto &term : terms) {
        double df = 0.0;
        for (const auto &other : tokens) {
            df += std::find(other.begin(), other.end(), term) != other.end() ? 1.0 : 0.0;
        }
        dfs.push_back(df);
    }

    std::vector<std::pair<std::string, double>> out;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        double score = 0.0;
        bool matched = false;
        for (std::size_t t = 0; t < terms.size(); ++t) {
            const auto &term = terms[t];
            const double tf =
                static_cast<double>(std::count(tokens[i].begin(), tokens[i].end(), term));
            if (tf == 0.0) {
                continue;
            }
            matched = true;
            const double df = dfs[t];
            const double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
            const double len = static_cast<double>(tokens[i].size());
            score += tf * (params.k1 + 1.0) /
                     (tf + params.k1 * (1.0 - params.b + params.b * len / avg)) * idf;
        }
        if (matched) {
            out.emplace_back(docs[i].id, score);
        }
    }
    std::sort(out.begin(), out.end(), [](const auto &a, const auto &b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    return out;
}

std::vector<std::string> greedy_chunks(const std::string &body, std::size_t threshold)
{
    std::vector<std::string> pieces;
    std::string current;
    for (char c : body) {
        if (c == '\n') {
            pieces.push_back(current);
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    pieces.push_back(current);

    std::vector<std::string> chunks;
    std::string chunk;
    bool open = false;
    for (const auto &piece : pieces) {
        chunk = open ? chunk + "\n" + piece : piece;
        open = true;
        if (factcheck::text::code_point_length(chunk) > threshold) {
            chunks.push_back(chunk);
            chunk.clear();
            open = false;
        }
    }
    if (open) {
        chunks.push_back(chunk);
    }
    return chunks;
}

double nll(const std::vector<factcheck::NliLogits> &logits,
           const std::vector<factcheck::Label> &labels, double temperature)
{
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        double denom = 0.0;
        for (double z : logits[i].values) {
            denom += std::exp(z / temperature);
        }
        const double p =
            std::exp(logits[i].values[factcheck::index_of(labels[i])] / temperature) / denom;
        sum -= std::log(p);
    }
    return sum / static_cast<double>(logits.size());
}

double grid_argmin(const std::vector<factcheck::NliLogits> &logits,
                   const std::vector<factcheck::Label> &labels, double lo, double hi,
                   std::size_t steps)
{
    double best_t = lo;
    double best = INFINITY;
    for (std::size_t s = 0; s <= steps; ++s) {
        const double t = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) *
                                                     static_cast<double>(s) /
                                                     static_cast<double>(steps));
        const double v = nll(logits, labels, t);
        if (v < best) {
            best = v;
            best_t = t;
        }
    }
    return best_t;
}

double f1_macro(const std::vector<factcheck::Label> &preds,
                const std::vector<factcheck::Label> &targets)
{
    double sum = 0.0;
    for (factcheck::Label c : factcheck::all_labels) {
        double tp = 0;
        double fp = 0;
        double fn = 0;
        for (std::size_t i = 0; i < preds.size(); ++i) {
            tp += preds[i] == c && targets[i] == c ? 1 : 0;
            fp += preds[i] == c && targets[i] != c ? 1 : 0;
            fn += preds[i] != c && targets[i] == c ? 1 : 0;
        }
        const double precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
        const double recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
        sum += precision + recall > 0 ? 2 * precision * recall / (precision + recall) : 0.0;
    }
    return sum / 3.0;
}

std::size_t argmax(const std::array<double, 3> &values)
{
    return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) -
                                    values.begin());
}

}  // namespace oracle
