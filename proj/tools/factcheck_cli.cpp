#include <CLI11.hpp>

#include <csignal>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "factcheck/calibration.hpp"
#include "factcheck/corpus.hpp"
#include "factcheck/highlight.hpp"
#include "factcheck/http_server.hpp"
#include "factcheck/lexical_index.hpp"
#include "factcheck/log.hpp"
#include "factcheck/metrics.hpp"
#include "factcheck/model_gateway.hpp"
#include "factcheck/nway.hpp"
#include "factcheck/pvi.hpp"
#include "factcheck/qacg.hpp"
#include "factcheck/retrieval.hpp"
#include "factcheck/service.hpp"
#include "factcheck/text.hpp"

namespace fs = std::filesystem;
using namespace factcheck;

namespace {

struct Bm25Flags {
    double k1 = Bm25Params::full_text().k1;
    double b = Bm25Params::full_text().b;

    void add(CLI::App *cmd)
    {
        cmd->add_option("--k1", k1, "BM-25 term-frequency saturation")->capture_default_str();
        cmd->add_option("--b", b, "BM-25 length normalization")->capture_default_str();
    }
    [[nodiscard]] Bm25Params params() const { return Bm25Params{k1, b}; }
};

void print_json(const json &value, const std::string &out)
{
    if (out.empty() || out == "-") {
        std::cout << value.dump(2) << "\n";
    } else {
        write_json_file(out, value);
    }
}

std::string read_text_file(const fs::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw PreconditionError("cannot open " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void print_counts(const ClaimDataset &ds)
{
    for (const auto &[split, claims] : ds.splits) {
        const auto c = ds.label_counts(split);
        std::cout << ds.name << " " << to_string(split) << ": " << claims.size()
                  << " claims (SUPPORTS " << c[0] << ", REFUTES " << c[1] << ", NEI " << c[2]
                  << ")\n";
    }
}

std::vector<ClaimDataset> load_datasets(const std::vector<std::string> &paths)
{
    std::vector<ClaimDataset> out;
    for (const auto &p : paths) {
        out.push_back(ClaimDataset::load_jsonl(p));
    }
    return out;
}

std::vector<std::size_t> parse_k_list(const std::string &text)
{
    std::vector<std::size_t> ks;
    std::stringstream in(text);
    for (std::string item; std::getline(in, item, ',');) {
        ks.push_back(std::stoul(item));
    }
    return ks;
}

/// Labels keyed by "id" or "claim_id"; a record may carry "logits" instead of "label".
std::map<std::string, Label> read_labels(const fs::path &path)
{
    std::map<std::string, Label> out;
    read_jsonl(path, [&out](const json &r, std::size_t) {
        const auto id = r.contains("id") ? r.at("id").get<std::string>()
                                         : r.at("claim_id").get<std::string>();
        Label label;
        if (r.contains("label")) {
            label = parse_label(r.at("label").get<std::string>());
        } else {
            NliLogits z;
            for (std::size_t i = 0; i < 3; ++i) {
                z.values[i] = r.at("logits").at(i).get<double>();
            }
            label = argmax_label(z.values);
        }
        out[id] = label;
    });
    return out;
}

HttpServer *active_server = nullptr;

void handle_signal(int)
{
    if (active_server != nullptr) {
        active_server->stop();
    }
}

}  // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Fact-checking pipeline toolkit"};
    app.require_subcommand(1);
    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "Debug logging");

    // ingest
    auto *ingest = app.add_subcommand("ingest", "Build a paragraph corpus from a page dump");
    std::string dump, lang, corpus_out, rules, corpus_id;
    std::size_t drop_dups = 0;
    ChunkingOptions chunking;
    ingest->add_option("--dump", dump, "Dump file or directory of {id,title,text} JSONL")->required();
    ingest->add_option("--lang", lang, "Two-letter language code")->required();
    ingest->add_option("--out", corpus_out, "Corpus JSONL")->required();
    ingest->add_option("--drop-top-dups", drop_dups, "Remove the D most duplicated paragraphs");
    ingest->add_option("--rules", rules, "Cleaning rules JSON");
    ingest->add_option("--corpus-id", corpus_id, "Defaults to the output file stem");
    ingest->add_option("--merge-threshold", chunking.merge_threshold)->capture_default_str();
    ingest->add_option("--min-len", chunking.min_len)->capture_default_str();

    // index
    auto *index_cmd = app.add_subcommand("index", "Lexical index");
    index_cmd->require_subcommand(1);
    auto *index_build = index_cmd->add_subcommand("build", "Index a corpus");
    std::string corpus_path, index_dir;
    index_build->add_option("--corpus", corpus_path)->required();
    index_build->add_option("--out", index_dir)->required();
    auto *index_search = index_cmd->add_subcommand("search", "Query an index");
    std::string query;
    std::size_t k = 20;
    Bm25Flags bm25;
    index_search->add_option("--idx", index_dir)->required();
    index_search->add_option("--query", query)->required();
    index_search->add_option("--k", k)->capture_default_str();
    bm25.add(index_search);

    // generate
    auto *generate = app.add_subcommand("generate", "Generate SUPPORTS/REFUTES/NEI claims");
    std::string backends_path, out_dir;
    GenerateOptions gen;
    generate->add_option("--corpus", corpus_path)->required();
    generate->add_option("--lang", lang, "Language code recorded on every claim");
    generate->add_option("--backends", backends_path, "Backend config JSON")->required();
    generate->add_option("--n-train", gen.n_train)->capture_default_str();
    generate->add_option("--n-dev", gen.n_dev)->capture_default_str();
    generate->add_option("--n-test", gen.n_test)->capture_default_str();
    generate->add_option("--seed", gen.seed)->capture_default_str();
    generate->add_option("--aux", gen.aux_count, "Auxiliary paragraphs per NEI source")
        ->capture_default_str();
    generate->add_option("--threads", gen.threads)->capture_default_str();
    generate->add_option("--name", gen.name)->capture_default_str();
    generate->add_option("--out", out_dir, "Output directory")->required();

    // dataset assembly
    std::string dataset_path, out_path;
    std::uint64_t seed = 0;
    std::vector<std::string> dataset_paths;
    auto *balance = app.add_subcommand("balance", "Downsample every split to equal label counts");
    balance->add_option("--dataset", dataset_path)->required();
    balance->add_option("--seed", seed)->capture_default_str();
    balance->add_option("--out", out_path)->required();
    auto *dedup = app.add_subcommand("dedup", "Drop claims repeating an earlier text");
    dedup->add_option("--dataset", dataset_path)->required();
    dedup->add_option("--out", out_path)->required();
    auto *mix = app.add_subcommand("mix", "Sample across datasets to the first one's shape");
    mix->add_option("--datasets", dataset_paths)->required()->expected(2, -1);
    mix->add_option("--seed", seed)->capture_default_str();
    mix->add_option("--out", out_path)->required();
    auto *sum = app.add_subcommand("sum", "Concatenate datasets");
    sum->add_option("--datasets", dataset_paths)->required()->expected(2, -1);
    sum->add_option("--out", out_path)->required();

    // tuples
    auto *tuples = app.add_subcommand("tuples", "Build n-way retrieval training tuples");
    TupleOptions tuple_opts;
    std::string split_name = "train";
    tuples->add_option("--dataset", dataset_path)->required();
    tuples->add_option("--idx", index_dir)->required();
    tuples->add_option("--n", tuple_opts.n)->capture_default_str();
    tuples->add_option("--split", split_name, "train, dev, test or all")->capture_default_str();
    tuples->add_option("--threads", tuple_opts.threads)->capture_default_str();
    tuples->add_option("--out", out_path)->required();
    bm25.add(tuples);

    // calibrate
    auto *calibrate = app.add_subcommand("calibrate", "Fit a temperature on labeled logits");
    std::string logits_path;
    calibrate->add_option("--logits", logits_path, "{id, logits, label} JSONL")->required();
    calibrate->add_option("--out", out_path)->required();

    // pvi
    auto *pvi_cmd = app.add_subcommand("pvi", "Pointwise V-information report");
    std::string null_logits, cond_logits, scaler_path, null_scaler_path;
    std::string pvi_split = "test";
    pvi_cmd->add_option("--dataset", dataset_path)->required();
    pvi_cmd->add_option("--null-logits", null_logits)->required();
    pvi_cmd->add_option("--cond-logits", cond_logits)->required();
    pvi_cmd->add_option("--scaler", scaler_path, "Scaler for the input-aware model")->required();
    pvi_cmd->add_option("--null-scaler", null_scaler_path, "Defaults to --scaler");
    pvi_cmd->add_option("--split", pvi_split, "train, dev, test or all")->capture_default_str();
    pvi_cmd->add_option("--report", out_path)->required();
    std::string records_path;
    pvi_cmd->add_option("--records", records_path, "Also write per-sample records JSONL");

    // retrieve
    auto *retrieve_cmd = app.add_subcommand("retrieve", "Retrieve evidence for claims");
    std::string claim, mode_name = "lexical";
    RetrievalConfig rcfg;
    retrieve_cmd->add_option("--claim", claim);
    retrieve_cmd->add_option("--claims", dataset_path, "Dataset JSONL for batch retrieval");
    retrieve_cmd->add_option("--corpus", corpus_path)->required();
    retrieve_cmd->add_option("--idx", index_dir, "Defaults to indexing the corpus in memory");
    retrieve_cmd->add_option("--backends", backends_path, "Backend config JSON; stubs if absent");
    retrieve_cmd->add_option("--mode", mode_name, "lexical, dense, dense_ans or dense_nli")
        ->capture_default_str();
    retrieve_cmd->add_option("--k", rcfg.k)->capture_default_str();
    retrieve_cmd->add_option("--ans-k", rcfg.ans_k)->capture_default_str();
    retrieve_cmd->add_option("--nli-k2", rcfg.nli_k2)->capture_default_str();
    retrieve_cmd->add_option("--out", out_path, "JSONL output; stdout if absent");
    bm25.add(retrieve_cmd);

    // eval
    auto *eval = app.add_subcommand("eval", "Metrics");
    eval->require_subcommand(1);
    auto *eval_retrieval = eval->add_subcommand("retrieval", "MRR@k and P@k");
    std::string results_path, gold_path, k_list = "1,2,5,10,20";
    bool csv = false;
    eval_retrieval->add_option("--results", results_path)->required();
    eval_retrieval->add_option("--gold", gold_path)->required();
    eval_retrieval->add_option("--k", k_list)->capture_default_str();
    eval_retrieval->add_flag("--csv", csv);
    eval_retrieval->add_option("--out", out_path);
    auto *eval_nli = eval->add_subcommand("nli", "F1-macro");
    std::string preds_path, targets_path;
    eval_nli->add_option("--preds", preds_path)->required();
    eval_nli->add_option("--targets", targets_path)->required();
    eval_nli->add_flag("--csv", csv);
    eval_nli->add_option("--out", out_path);

    // highlight
    auto *highlight_cmd = app.add_subcommand("highlight", "Show words resembling the claim");
    std::string text_path;
    highlight_cmd->add_option("--claim", claim)->required();
    highlight_cmd->add_option("--text", text_path, "Paragraph text file")->required();

    // serve
    auto *serve = app.add_subcommand("serve", "Run the HTTP service");
    std::string config_path, host = "127.0.0.1";
    int port = 8080;
    serve->add_option("--config", config_path, "Service config JSON")->required();
    serve->add_option("--port", port)->capture_default_str();
    serve->add_option("--host", host)->capture_default_str();

    CLI11_PARSE(app, argc, argv);
    if (verbose) {
        log::set_level(log::Level::debug);
    }

    try {
        if (*ingest) {
            const Cleaner cleaner = rules.empty() ? Cleaner::defaults() : Cleaner::from_file(rules);
            std::vector<RawPage> pages;
            for (const auto &raw : read_dump(dump)) {
                pages.push_back(clean_page(raw, cleaner));
            }
            CorpusOptions opts;
            opts.corpus_id = corpus_id.empty() ? fs::path(corpus_out).stem().string() : corpus_id;
            opts.language = lang;
            opts.chunking = chunking;
            opts.drop_top_duplicates = drop_dups;
            const Corpus corpus = build_corpus(pages, opts);
            corpus.save_jsonl(corpus_out);
            std::cout << pages.size() << " pages -> " << corpus.page_count() << " pages, "
                      << corpus.size() << " paragraphs\n";
        } else if (*index_build) {
            const auto index = build_index(Corpus::load_jsonl(corpus_path));
            index.save(index_dir);
            std::cout << index.doc_count() << " documents, " << index.term_count() << " terms\n";
        } else if (*index_search) {
            const auto index = InvertedIndex::load(index_dir);
            for (const auto &r : index.search(query, k, bm25.params())) {
                std::cout << to_json(r).dump() << "\n";
            }
        } else if (*generate) {
            const Corpus corpus = Corpus::load_jsonl(corpus_path, {}, lang);
            const auto gw = ModelGateway::from_config(GatewayConfig::load(backends_path));
            const auto result = generate_dataset(corpus, gw, gen);
            fs::create_directories(out_dir);
            result.dataset.save_jsonl(fs::path(out_dir) / (gen.name + ".jsonl"));
            JsonlWriter log_out(fs::path(out_dir) / "generation_log.jsonl");
            for (const auto &issue : result.log) {
                log_out.write(json{{"para_id", issue.para_id},
                                   {"stage", issue.stage},
                                   {"entity", issue.entity},
                                   {"message", issue.message}});
            }
            log_out.close();
            print_counts(result.dataset);
            std::cout << result.log.size() << " generation issues logged\n";
        } else if (*balance) {
            const auto ds = stratify_balance(ClaimDataset::load_jsonl(dataset_path), seed);
            ds.save_jsonl(out_path);
            print_counts(ds);
        } else if (*dedup) {
            const auto ds = dedup_dataset(ClaimDataset::load_jsonl(dataset_path));
            ds.save_jsonl(out_path);
            print_counts(ds);
        } else if (*mix) {
            const auto ds = build_mix(load_datasets(dataset_paths), seed);
            ds.save_jsonl(out_path);
            print_counts(ds);
        } else if (*sum) {
            const auto ds = build_sum(load_datasets(dataset_paths));
            ds.save_jsonl(out_path);
            print_counts(ds);
        } else if (*tuples) {
            const auto ds = ClaimDataset::load_jsonl(dataset_path);
            const auto index = InvertedIndex::load(index_dir);
            std::vector<Claim> claims;
            for (const auto &[split, items] : ds.splits) {
                if (split_name == "all" || to_string(split) == split_name) {
                    claims.insert(claims.end(), items.begin(), items.end());
                }
            }
            tuple_opts.params = bm25.params();
            const auto result = build_tuples(claims, index, tuple_opts);
            save_tuples(out_path, result.tuples);
            for (const auto &e : result.errors) {
                log::error(e.claim_id + ": " + e.message);
            }
            std::size_t short_count = 0;
            for (const auto &t : result.tuples) {
                short_count += t.is_short ? 1 : 0;
            }
            std::cout << result.tuples.size() << " tuples (" << short_count << " short), "
                      << result.errors.size() << " errors\n";
        } else if (*calibrate) {
            std::vector<NliLogits> logits;
            std::vector<Label> labels;
            for (const auto &r : read_logits(logits_path)) {
                if (!r.label) {
                    throw FormatError("logits record '" + r.id + "' has no label");
                }
                logits.push_back(r.logits);
                labels.push_back(*r.label);
            }
            const auto scaler = fit_temperature(logits, labels);
            scaler.save(out_path);
            std::cout << "T = " << scaler.temperature << ", NLL " << nll(logits, labels, 1.0)
                      << " -> " << scaler.fit_nll << " over " << scaler.fit_set_size
                      << " samples\n";
        } else if (*pvi_cmd) {
            const auto ds = ClaimDataset::load_jsonl(dataset_path);
            std::vector<LabeledSample> samples;
            for (const auto &[split, items] : ds.splits) {
                if (pvi_split == "all" || to_string(split) == pvi_split) {
                    for (const auto &c : items) {
                        samples.push_back(LabeledSample{c.claim_id, c.label});
                    }
                }
            }
            const auto cond_scaler = TemperatureScaler::load(scaler_path);
            const auto null_scaler = null_scaler_path.empty()
                                         ? cond_scaler
                                         : TemperatureScaler::load(null_scaler_path);
            auto verdicts = [&samples](const std::string &path, const TemperatureScaler &s) {
                std::vector<NliVerdict> out;
                for (const auto &z : align_logits(samples, read_logits(path))) {
                    out.push_back(s.apply(z));
                }
                return out;
            };
            const auto records = build_records(samples, verdicts(null_logits, null_scaler),
                                               verdicts(cond_logits, cond_scaler));
            const auto report = analyze(records);
            print_json(report.to_json(), out_path);
            if (!records_path.empty()) {
                JsonlWriter rec_out(records_path);
                for (const auto &r : records) {
                    rec_out.write(json{{"sample_id", r.sample_id},
                                       {"label", to_string(r.label)},
                                       {"p_null", r.p_null},
                                       {"p_cond", r.p_cond},
                                       {"pvi", r.pvi}});
                }
                rec_out.close();
            }
            std::cout << report.to_json().dump(2) << "\n";
        } else if (*retrieve_cmd) {
            if (claim.empty() == dataset_path.empty()) {
                throw PreconditionError("give exactly one of --claim and --claims");
            }
            const Corpus corpus = Corpus::load_jsonl(corpus_path);
            auto index = std::make_shared<const InvertedIndex>(
                index_dir.empty() ? build_index(corpus) : InvertedIndex::load(index_dir));
            GatewayConfig gcfg = backends_path.empty() ? GatewayConfig::all_stubs(0)
                                                       : GatewayConfig::load(backends_path);
            if (gcfg.corpus_id.empty()) {
                gcfg.corpus_id = corpus.corpus_id();
            }
            const auto gw = ModelGateway::from_config(gcfg, index);
            rcfg.mode = parse_retrieval_mode(mode_name);
            rcfg.bm25 = bm25.params();
            std::unique_ptr<JsonlWriter> file;
            if (!out_path.empty()) {
                file = std::make_unique<JsonlWriter>(out_path);
            }
            auto emit = [&file](const json &j) {
                if (file) {
                    file->write(j);
                } else {
                    std::cout << j.dump() << "\n";
                }
            };
            if (!claim.empty()) {
                for (const auto &r : retrieve(claim, rcfg, *index, corpus, gw)) {
                    emit(to_json(r));
                }
            } else {
                for (const auto &[split, items] : ClaimDataset::load_jsonl(dataset_path).splits) {
                    for (const auto &c : items) {
                        json results = json::array();
                        for (const auto &r : retrieve(c.text, rcfg, *index, corpus, gw)) {
                            results.push_back(to_json(r));
                        }
                        emit(json{{"claim_id", c.claim_id}, {"results", results}});
                    }
                }
            }
            if (file) {
                file->close();
            }
        } else if (*eval_retrieval) {
            const auto report = evaluate_retrieval(read_result_lists(results_path),
                                                   read_gold(gold_path), parse_k_list(k_list));
            if (csv) {
                std::cout << report.to_csv();
            } else {
                print_json(report.to_json(), out_path);
            }
        } else if (*eval_nli) {
            const auto preds = read_labels(preds_path);
            const auto targets = read_labels(targets_path);
            std::vector<Label> p;
            std::vector<Label> t;
            for (const auto &[id, label] : targets) {
                auto it = preds.find(id);
                if (it == preds.end()) {
                    throw PreconditionError("no prediction for '" + id + "'");
                }
                p.push_back(it->second);
                t.push_back(label);
            }
            const auto report = evaluate_classification(p, t);
            if (csv) {
                std::cout << report.to_csv();
            } else {
                print_json(report.to_json(), out_path);
            }
        } else if (*highlight_cmd) {
            const std::string paragraph = read_text_file(text_path);
            for (const auto &span : highlight(claim, paragraph)) {
                json j = to_json(span);
                j["word"] = text::slice(paragraph, span.start, span.end);
                std::cout << j.dump() << "\n";
            }
        } else if (*serve) {
            const auto config = ServiceConfig::load(config_path);
            Service service;
            HttpServer server(service, config.static_dir);
            const int bound = server.bind(host, port);
            if (bound < 0) {
                throw PreconditionError("cannot bind " + host + ":" + std::to_string(port));
            }
            active_server = &server;
            std::signal(SIGINT, handle_signal);
            std::signal(SIGTERM, handle_signal);
            std::thread loop([&server] { server.serve(); });
            service.init(config);
            log::info("serving on http://" + host + ":" + std::to_string(bound));
            loop.join();
            active_server = nullptr;
        }
    } catch (const std::exception &e) {
        log::error(e.what());
        return 1;
    }
    return 0;
}
