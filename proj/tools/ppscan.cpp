#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "ppscan/annotated.hpp"
#include "ppscan/corpus_store.hpp"
#include "ppscan/errors.hpp"
#include "ppscan/evaluate.hpp"
#include "ppscan/pipeline.hpp"
#include "ppscan/report.hpp"
#include "ppscan/run_config.hpp"
#include "ppscan/train.hpp"

namespace fs = std::filesystem;

namespace {

// Flags shared by every subcommand. Optionals so that "not passed" is
// distinguishable from "passed the default": the config file fills the gaps.
struct CommonFlags {
    std::optional<std::string> corpus_dir;
    std::optional<std::string> config_path;
    std::optional<std::uint32_t> seed;
    std::vector<std::string> formats;
};

struct BackendFlags {
    std::optional<std::string> model;
    std::optional<std::string> lexicon;
    std::optional<double> threshold;
    std::vector<std::string> category_thresholds;  // Category=value
};

struct FetchFlags {
    std::optional<int> timeout;
    std::optional<int> retries;
    std::optional<std::size_t> parallelism;
    std::optional<int> politeness_delay_ms;
    std::optional<std::string> user_agent;
};

struct TrainFlags {
    std::optional<std::size_t> epochs;
    std::optional<std::size_t> batch_size;
    std::optional<double> peak_lr;
    std::optional<double> warmup_fraction;
    std::optional<double> lr_div;
    std::optional<double> l2;
    std::optional<std::size_t> max_tokens;
    bool downsample = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--corpus-dir", f.corpus_dir, "Corpus directory (default: corpus)");
    cmd->add_option("--config", f.config_path, "JSON config file; flags override its values");
    cmd->add_option("--seed", f.seed, "Seed for every randomized step (default: 1)");
    cmd->add_option("--format", f.formats,
                    "Report format: csv, json or md; repeat for several (default: all)");
}

void add_backend(CLI::App* cmd, BackendFlags& f) {
    cmd->add_option("--model", f.model,
                    "Classifier model: a linear bundle, or an .onnx file with its "
                    "vocabulary sidecar; omit to use the lexicon");
    cmd->add_option("--lexicon", f.lexicon, "Lexicon file for the keyword backend");
    cmd->add_option("--threshold", f.threshold, "Decision threshold for all categories");
    cmd->add_option("--category-threshold", f.category_thresholds,
                    "Per-category decision threshold as Category=value (repeatable)");
}

void add_fetch(CLI::App* cmd, FetchFlags& f) {
    cmd->add_option("--timeout", f.timeout, "Per-request timeout in seconds");
    cmd->add_option("--retries", f.retries, "Retries after a failed request");
    cmd->add_option("--parallelism", f.parallelism, "Max in-flight fetches");
    cmd->add_option("--politeness-delay-ms", f.politeness_delay_ms,
                    "Minimum gap between requests to the same host");
    cmd->add_option("--user-agent", f.user_agent, "User-Agent header");
}

void add_train(CLI::App* cmd, TrainFlags& f) {
    cmd->add_option("--epochs", f.epochs, "Training epochs (default: 10)");
    cmd->add_option("--batch-size", f.batch_size, "Mini-batch size (default: 32)");
    cmd->add_option("--peak-lr", f.peak_lr, "One-cycle peak learning rate (default: 0.5)");
    cmd->add_option("--warmup-fraction", f.warmup_fraction,
                    "Share of steps spent warming up (default: 0.3)");
    cmd->add_option("--lr-div", f.lr_div, "Peak-to-floor learning-rate ratio (default: 25)");
    cmd->add_option("--l2", f.l2, "L2 regularization strength (default: 0)");
    cmd->add_option("--max-tokens", f.max_tokens, "Token cap per segment (default: 512)");
    cmd->add_flag("--downsample", f.downsample,
                  "Balance each category by downsampling its majority class");
}

std::pair<std::string, double> parse_threshold_override(const std::string& spec) {
    auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ppscan::Error("expected Category=value, got \"" + spec + "\"");
    std::string name = spec.substr(0, eq);
    double value = 0.0;
    try {
        std::size_t end = 0;
        value = std::stod(spec.substr(eq + 1), &end);
        if (end != spec.size() - eq - 1) throw std::invalid_argument("trailing junk");
    } catch (const std::exception&) {
        throw ppscan::Error("bad threshold value in \"" + spec + "\"");
    }
    if (value < 0.0 || value > 1.0)
        throw ppscan::Error("threshold must be in [0, 1], got \"" + spec + "\"");
    return {name, value};
}

// defaults -> config file -> CLI flags, most specific wins.
ppscan::RunConfig resolve(const CommonFlags& common,
                          const std::optional<std::string>& manifest,
                          const std::optional<std::string>& stopwords,
                          const BackendFlags* backend, const FetchFlags* fetch) {
    ppscan::RunConfig config;
    if (common.config_path) config = ppscan::load_run_config(*common.config_path, config);

    if (common.corpus_dir) config.corpus_dir = *common.corpus_dir;
    if (common.seed) config.seed = *common.seed;
    if (!common.formats.empty()) {
        config.formats.clear();
        for (const auto& name : common.formats) {
            auto f = ppscan::report::format_from_name(name);
            if (!f) throw ppscan::Error("unknown report format \"" + name + "\"");
            if (std::find(config.formats.begin(), config.formats.end(), *f) ==
                config.formats.end())
                config.formats.push_back(*f);
        }
    }
    if (manifest) config.manifest = *manifest;
    if (stopwords) config.stopwords = *stopwords;

    if (backend) {
        if (backend->model) config.model = *backend->model;
        if (backend->lexicon) config.lexicon = *backend->lexicon;
        if (backend->threshold) {
            if (*backend->threshold < 0.0 || *backend->threshold > 1.0)
                throw ppscan::Error("threshold must be in [0, 1]");
            config.threshold = *backend->threshold;
        }
        for (const auto& spec : backend->category_thresholds) {
            auto [name, value] = parse_threshold_override(spec);
            config.category_thresholds[name] = value;
        }
    }
    if (fetch) {
        if (fetch->timeout) config.fetch.timeout_seconds = *fetch->timeout;
        if (fetch->retries) config.fetch.retries = *fetch->retries;
        if (fetch->parallelism) config.fetch.parallelism = *fetch->parallelism;
        if (fetch->politeness_delay_ms) config.fetch.politeness_delay_ms = *fetch->politeness_delay_ms;
        if (fetch->user_agent) config.fetch.user_agent = *fetch->user_agent;
    }
    return config;
}

ppscan::classify::TrainConfig make_train_config(const TrainFlags& f, std::uint32_t seed) {
    ppscan::classify::TrainConfig tc;
    tc.seed = seed;
    if (f.epochs) tc.epochs = *f.epochs;
    if (f.batch_size) tc.batch_size = *f.batch_size;
    if (f.peak_lr) tc.peak_lr = *f.peak_lr;
    if (f.warmup_fraction) tc.warmup_fraction = *f.warmup_fraction;
    if (f.lr_div) tc.lr_div = *f.lr_div;
    if (f.l2) tc.l2 = *f.l2;
    if (f.max_tokens) tc.max_tokens = *f.max_tokens;
    tc.downsample = f.downsample;
    return tc;
}

ppscan::prep::StopwordSet load_stopwords(const ppscan::RunConfig& config, const char* who) {
    if (config.stopwords.empty())
        throw ppscan::Error(std::string(who) + " requires a stopword list (--stopwords)");
    return ppscan::prep::StopwordSet::load(config.stopwords);
}

void print_filter_report(const ppscan::prep::FilterReport& r) {
    std::cout << "documents: " << r.input_documents << " in, " << r.kept_documents
              << " kept (" << r.excluded_no_privacy << " without \"privacy\", "
              << r.excluded_low_keyterms << " below the key-term floor); "
              << r.dropped_short_paragraphs << " short paragraphs dropped\n";
}

void print_report_outcome(const ppscan::pipeline::ReportOutcome& outcome) {
    const auto& s = outcome.stats;
    std::cout << "corpus: " << s.policy_count << " policies, " << s.total_paragraphs
              << " paragraphs, " << s.total_words << " words\n";
    for (const auto& path : outcome.files) std::cout << "wrote " << path.string() << "\n";
}

fs::path fold_report_path(const fs::path& base, std::size_t fold) {
    std::string ext = base.has_extension() ? base.extension().string() : ".json";
    fs::path p = base;
    p.replace_extension();
    return p.string() + "_fold" + std::to_string(fold) + ext;
}

std::string overall_line(const ppscan::classify::EvalReport& r) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", r.overall);
    return "overall accuracy " + std::string(buf) + " over " +
           std::to_string(r.segment_count) + " segments";
}

int run_command(const std::function<int()>& body) {
    const auto fail = [](const std::exception& e, int code) {
        std::cerr << "ppscan: error: " << e.what() << "\n";
        return code;
    };
    try {
        return body();
    } catch (const ppscan::EmptyCorpus& e) {
        return fail(e, 3);
    } catch (const ppscan::MalformedAnnotation& e) {
        return fail(e, 4);
    } catch (const ppscan::InsufficientData& e) {
        return fail(e, 4);
    } catch (const ppscan::NonFiniteLoss& e) {
        return fail(e, 4);
    } catch (const ppscan::KTooLarge& e) {
        return fail(e, 4);
    } catch (const ppscan::EmptyTestSet& e) {
        return fail(e, 4);
    } catch (const std::exception& e) {
        return fail(e, 2);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ppscan — privacy-policy corpus scanner"};
    app.require_subcommand(1);

    CommonFlags ingest_common, extract_common, prep_common, classify_common, report_common,
        analyze_common, train_common, eval_common;
    BackendFlags classify_backend, analyze_backend, eval_backend;
    FetchFlags ingest_fetch;
    TrainFlags train_flags, eval_train_flags;

    auto* cmd_ingest =
        app.add_subcommand("ingest", "Fetch the manifest's policies and triage availability");
    add_common(cmd_ingest, ingest_common);
    add_fetch(cmd_ingest, ingest_fetch);
    std::optional<std::string> ingest_manifest, ingest_stopwords;
    cmd_ingest->add_option("--manifest", ingest_manifest,
                           "Manifest: app_id,group,url[,delisted] rows");
    cmd_ingest->add_option("--stopwords", ingest_stopwords,
                           "English stopword list, one word per line");

    auto* cmd_extract =
        app.add_subcommand("extract", "Extract paragraph text from the ingested policies");
    add_common(cmd_extract, extract_common);

    auto* cmd_prep =
        app.add_subcommand("prep", "Filter for relevance and tokenize the extracted documents");
    add_common(cmd_prep, prep_common);
    std::optional<std::string> prep_stopwords;
    cmd_prep->add_option("--stopwords", prep_stopwords, "Stopword list, one word per line");

    auto* cmd_train = app.add_subcommand("train", "Train the linear classifier on labeled segments");
    add_common(cmd_train, train_common);
    add_train(cmd_train, train_flags);
    std::string train_data, train_out;
    std::optional<std::string> train_stopwords, train_eval_out, train_export_onnx;
    double train_test_fraction = 0.2;
    cmd_train->add_option("--data", train_data, "Labeled segments, JSON lines")->required();
    cmd_train->add_option("--out", train_out, "Where to write the model bundle")->required();
    cmd_train->add_option("--stopwords", train_stopwords, "Stopword list, one word per line");
    cmd_train->add_option("--test-fraction", train_test_fraction,
                          "Held-out share for the post-training evaluation (default: 0.2)");
    cmd_train->add_option("--eval-out", train_eval_out,
                          "Where to write the held-out evaluation (default: <out>.eval.json)");
    cmd_train->add_option("--export-onnx", train_export_onnx,
                          "Also export the bundle as an ONNX model + vocabulary sidecar");

    auto* cmd_evaluate =
        app.add_subcommand("evaluate", "Evaluate a classifier on labeled segments");
    add_common(cmd_evaluate, eval_common);
    add_backend(cmd_evaluate, eval_backend);
    add_train(cmd_evaluate, eval_train_flags);
    std::string eval_data, eval_out;
    std::optional<std::string> eval_stopwords;
    std::optional<std::size_t> eval_folds;
    cmd_evaluate->add_option("--data", eval_data, "Labeled segments, JSON lines")->required();
    cmd_evaluate->add_option("--out", eval_out, "Where to write the evaluation report")->required();
    cmd_evaluate->add_option("--stopwords", eval_stopwords, "Stopword list, one word per line");
    cmd_evaluate->add_option("--folds", eval_folds,
                             "Cross-validate the linear trainer with this many folds "
                             "instead of evaluating --model");

    auto* cmd_classify =
        app.add_subcommand("classify", "Score every kept segment with the configured backend");
    add_common(cmd_classify, classify_common);
    add_backend(cmd_classify, classify_backend);

    auto* cmd_report =
        app.add_subcommand("report", "Aggregate stored scores into the report bundle");
    add_common(cmd_report, report_common);

    auto* cmd_analyze =
        app.add_subcommand("analyze", "extract + prep + classify + report in one run");
    add_common(cmd_analyze, analyze_common);
    add_backend(cmd_analyze, analyze_backend);
    std::optional<std::string> analyze_stopwords;
    cmd_analyze->add_option("--stopwords", analyze_stopwords, "Stopword list, one word per line");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (*cmd_ingest)
        return run_command([&] {
            auto config = resolve(ingest_common, ingest_manifest, ingest_stopwords, nullptr,
                                  &ingest_fetch);
            ppscan::ingest::CorpusLock lock(config.corpus_dir);
            auto outcome = ppscan::pipeline::run_ingest(config);
            std::cout << ppscan::report::render_availability(outcome.summary,
                                                             ppscan::report::Format::Md)
                      << "\ningested " << outcome.records << " records into "
                      << config.corpus_dir.string() << "\n";
            return 0;
        });

    if (*cmd_extract)
        return run_command([&] {
            auto config = resolve(extract_common, {}, {}, nullptr, nullptr);
            ppscan::ingest::CorpusLock lock(config.corpus_dir);
            std::size_t n = ppscan::pipeline::run_extract(config);
            std::cout << "extracted " << n << " documents\n";
            return 0;
        });

    if (*cmd_prep)
        return run_command([&] {
            auto config = resolve(prep_common, {}, prep_stopwords, nullptr, nullptr);
            ppscan::ingest::CorpusLock lock(config.corpus_dir);
            print_filter_report(ppscan::pipeline::run_prep(config));
            return 0;
        });

    if (*cmd_train)
        return run_command([&] {
            auto config = resolve(train_common, {}, train_stopwords, nullptr, nullptr);
            auto stopwords = load_stopwords(config, "train");
            auto data = ppscan::classify::read_annotated_jsonl(train_data);
            auto tc = make_train_config(train_flags, config.seed);

            auto split = ppscan::classify::stratified_split(data, train_test_fraction, config.seed);
            auto bundle = ppscan::classify::train_linear(split.train, tc, stopwords);
            bundle.save_linear(train_out);
            std::cout << "trained on " << split.train.size() << " segments ("
                      << split.test.size() << " held out); wrote " << train_out << "\n";
            if (train_export_onnx) {
                bundle.export_onnx(*train_export_onnx);
                std::cout << "exported " << *train_export_onnx << " + vocabulary sidecar\n";
            }
            if (!split.test.empty()) {
                auto report = ppscan::classify::evaluate(bundle, split.test, stopwords);
                fs::path eval_path = train_eval_out
                                         ? fs::path(*train_eval_out)
                                         : fs::path(train_out).replace_extension(".eval.json");
                ppscan::ingest::atomic_write(
                    eval_path,
                    ppscan::report::render_eval_report(report, ppscan::report::Format::Json));
                std::cout << "held-out " << overall_line(report) << "; wrote "
                          << eval_path.string() << "\n";
            } else {
                std::cout << "no held-out segments; skipping evaluation\n";
            }
            return 0;
        });

    if (*cmd_evaluate)
        return run_command([&] {
            auto config = resolve(eval_common, {}, eval_stopwords, &eval_backend, nullptr);
            auto stopwords = load_stopwords(config, "evaluate");
            auto data = ppscan::classify::read_annotated_jsonl(eval_data);
            if (eval_folds) {
                auto tc = make_train_config(eval_train_flags, config.seed);
                auto cv = ppscan::classify::cross_validate(data, *eval_folds, tc, stopwords);
                for (std::size_t i = 0; i < cv.folds.size(); ++i) {
                    fs::path path = fold_report_path(eval_out, i + 1);
                    ppscan::ingest::atomic_write(path,
                                                 ppscan::report::render_eval_report(
                                                     cv.folds[i], ppscan::report::Format::Json));
                    std::cout << "fold " << (i + 1) << ": " << overall_line(cv.folds[i])
                              << "; wrote " << path.string() << "\n";
                }
                std::cout << "mean: " << overall_line(cv.mean) << "\n";
            } else {
                auto bundle = ppscan::pipeline::load_backend(config);
                auto report = ppscan::classify::evaluate(bundle, data, stopwords);
                ppscan::ingest::atomic_write(
                    eval_out,
                    ppscan::report::render_eval_report(report, ppscan::report::Format::Json));
                std::cout << overall_line(report) << "; wrote " << eval_out << "\n";
            }
            return 0;
        });

    if (*cmd_classify)
        return run_command([&] {
            auto config = resolve(classify_common, {}, {}, &classify_backend, nullptr);
            ppscan::ingest::CorpusLock lock(config.corpus_dir);
            std::size_t n = ppscan::pipeline::run_classify(config);
            std::cout << "scored " << n << " segments\n";
            return 0;
        });

    if (*cmd_report)
        return run_command([&] {
            auto config = resolve(report_common, {}, {}, nullptr, nullptr);
            ppscan::ingest::CorpusLock lock(config.corpus_dir);
            print_report_outcome(ppscan::pipeline::run_report(config));
            return 0;
        });

    if (*cmd_analyze)
        return run_command([&] {
            auto config = resolve(analyze_common, {}, analyze_stopwords, &analyze_backend, nullptr);
            ppscan::ingest::CorpusLock lock(config.corpus_dir);
            auto outcome = ppscan::pipeline::run_analyze(config);
            std::cout << "extracted " << outcome.documents_extracted << " documents\n";
            print_filter_report(outcome.filter);
            std::cout << "scored " << outcome.segments_scored << " segments\n";
            print_report_outcome(outcome.report);
            return 0;
        });

    return 0;
}
