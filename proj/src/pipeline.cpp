#include "ppscan/pipeline.hpp"

#include <array>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ppscan/errors.hpp"
#include "ppscan/extract.hpp"
#include "ppscan/lexicon.hpp"
#include "ppscan/manifest.hpp"
#include "ppscan/report.hpp"
#include "ppscan/tokenize.hpp"
#include "ppscan/triage.hpp"

namespace ppscan::pipeline {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

IngestOutcome run_ingest(const RunConfig& config, ingest::HttpFetcher& fetcher) {
    if (config.manifest.empty()) throw Error("ingest requires a manifest path");
    if (config.stopwords.empty())
        throw Error("ingest requires a stopword list (used for language triage)");

    auto entries = ingest::read_manifest(config.manifest);
    auto stopwords = prep::StopwordSet::load(config.stopwords);
    ingest::EnglishDetector english(stopwords);

    ingest::CorpusStore store(config.corpus_dir);
    auto records = ingest::fetch_all(entries, fetcher, config.fetch.parallelism);
    for (auto& record : records) {
        record.availability = ingest::triage(record, english);
        store.save_record(record);
    }

    IngestOutcome out;
    out.summary = ingest::availability_summary(records);
    out.records = records.size();
    return out;
}

IngestOutcome run_ingest(const RunConfig& config) {
    ingest::HttplibFetcher fetcher(config.fetch);
    return run_ingest(config, fetcher);
}

std::size_t run_extract(const RunConfig& config) {
    ingest::CorpusStore store(config.corpus_dir);
    std::size_t written = 0;
    for (const auto& app_id : store.list_apps()) {
        auto record = store.load_record(app_id);
        if (!record.included()) continue;
        store.save_document(extract::extract_text(record));
        ++written;
    }
    return written;
}

namespace {

// Extracted documents in store order (app_id-sorted), groups from meta.json.
std::vector<extract::Document> load_documents(const ingest::CorpusStore& store) {
    std::vector<extract::Document> docs;
    for (const auto& app_id : store.list_apps()) {
        if (!store.has_document(app_id)) continue;
        auto record = store.load_record(app_id);
        docs.push_back(store.load_document(app_id, record.entry.group));
    }
    return docs;
}

std::vector<prep::PreparedDocument> load_prepared_corpus(const ingest::CorpusStore& store) {
    std::vector<prep::PreparedDocument> docs;
    for (const auto& app_id : store.list_apps()) {
        if (!store.has_prepared(app_id)) continue;
        docs.push_back(store.load_prepared(app_id));
    }
    return docs;
}

}  // namespace

prep::FilterReport run_prep(const RunConfig& config) {
    if (config.stopwords.empty()) throw Error("prep requires a stopword list");
    auto stopwords = prep::StopwordSet::load(config.stopwords);

    ingest::CorpusStore store(config.corpus_dir);
    auto annotated = prep::annotate_corpus(load_documents(store), stopwords);
    for (const auto& doc : annotated.documents) store.save_prepared(doc);
    return annotated.report;
}

classify::ModelBundle load_backend(const RunConfig& config) {
    classify::ModelBundle bundle;
    if (config.model.empty()) {
        if (config.lexicon.empty())
            throw Error("no model configured and no lexicon to fall back on");
        bundle = classify::ModelBundle::make_lexicon(classify::Lexicon::load(config.lexicon));
    } else if (config.model.extension() == ".onnx") {
        bundle = classify::load_external_model(config.model);
    } else {
        bundle = classify::ModelBundle::load_linear(config.model);
    }
    bundle.set_thresholds(config.resolve_thresholds(bundle.thresholds()));
    return bundle;
}

std::size_t run_classify(const RunConfig& config) {
    auto bundle = load_backend(config);
    const std::string backend = classify::backend_kind_name(bundle.kind());

    ingest::CorpusStore store(config.corpus_dir);
    std::size_t scored = 0;
    for (const auto& app_id : store.list_apps()) {
        if (!store.has_prepared(app_id)) continue;
        auto doc = store.load_prepared(app_id);
        if (!doc.kept) continue;

        json segments = json::array();
        for (const auto& seg : doc.segments) {
            if (!seg.kept) continue;
            auto labels = classify::classify_segment(seg, bundle);
            json entry;
            entry["index"] = seg.paragraph.index;
            entry["word_count"] = seg.paragraph.word_count;
            entry["scores"] = json::array();
            entry["decisions"] = json::array();
            for (std::size_t c = 0; c < kNumCategories; ++c) {
                entry["scores"].push_back(labels.scores[c]);
                entry["decisions"].push_back(labels.decisions[c]);
            }
            segments.push_back(std::move(entry));
            ++scored;
        }

        json j;
        j["app_id"] = doc.app_id;
        j["group"] = doc.group;
        j["backend"] = backend;
        j["segments"] = std::move(segments);
        ingest::atomic_write(store.app_dir(doc.app_id) / "scores.json", j.dump(2) + "\n");
    }
    return scored;
}

namespace {

metrics::ScoredPolicy load_scores(const ingest::CorpusStore& store, const std::string& app_id) {
    fs::path path = store.app_dir(app_id) / "scores.json";
    if (!fs::exists(path))
        throw Error("no scores for \"" + app_id + "\" (run classify before report)");

    json j;
    try {
        j = json::parse(ingest::read_file(path));
    } catch (const json::exception& e) {
        throw Error(path.string() + ": " + e.what());
    }

    metrics::ScoredPolicy policy;
    policy.app_id = j.at("app_id").get<std::string>();
    policy.group = j.at("group").get<std::string>();
    for (const auto& entry : j.at("segments")) {
        metrics::ScoredSegment seg;
        seg.paragraph_index = entry.at("index").get<std::size_t>();
        seg.word_count = entry.at("word_count").get<std::size_t>();
        const auto& decisions = entry.at("decisions");
        if (decisions.size() != kNumCategories)
            throw Error(path.string() + ": expected " + std::to_string(kNumCategories) +
                        " decisions per segment");
        for (std::size_t c = 0; c < kNumCategories; ++c)
            seg.decisions[c] = decisions[c].get<bool>();
        policy.segments.push_back(std::move(seg));
    }
    return policy;
}

}  // namespace

ReportOutcome run_report(const RunConfig& config) {
    ingest::CorpusStore store(config.corpus_dir);
    auto prepared = load_prepared_corpus(store);

    ReportOutcome out;
    out.filter = prep::recount_filter_report(prepared);
    out.stats = metrics::corpus_stats(prepared);  // EmptyCorpus when nothing survived
    out.groups = metrics::group_stats(prepared);

    std::vector<metrics::ScoredPolicy> scored;
    for (const auto& doc : prepared) {
        if (!doc.kept) continue;
        scored.push_back(load_scores(store, doc.app_id));
    }

    std::array<metrics::MetricTable, 3> tables = {
        metrics::positive_segments(scored),
        metrics::highlighted_segments(scored),
        metrics::highlighted_words(scored),
    };

    fs::create_directories(store.reports_dir());
    auto emit = [&](const std::string& stem, const auto& render) {
        for (auto fmt : config.formats) {
            fs::path path = store.reports_dir() / (stem + "." + report::format_name(fmt));
            ingest::atomic_write(path, render(fmt));
            out.files.push_back(path);
        }
    };

    emit("corpus_stats",
         [&](report::Format f) { return report::render_corpus_stats(out.stats, f); });
    emit("group_stats",
         [&](report::Format f) { return report::render_group_stats(out.groups, f); });
    emit("filter_report",
         [&](report::Format f) { return report::render_filter_report(out.filter, f); });

    for (std::size_t k = 0; k < tables.size(); ++k) {
        const auto& table = tables[k];
        const std::string stem = metrics::metric_kind_name(table.kind);
        emit(stem, [&](report::Format f) { return report::render_metric_table(table, f); });

        const auto& refs = config.references[k];
        if (!refs.configured()) continue;
        auto comparison = metrics::compare(table, metrics::ReferenceTable::load(refs.free),
                                           metrics::ReferenceTable::load(refs.premium));
        emit(stem + "_delta",
             [&](report::Format f) { return report::render_comparison(comparison, f); });
    }
    return out;
}

AnalyzeOutcome run_analyze(const RunConfig& config) {
    AnalyzeOutcome out;
    out.documents_extracted = run_extract(config);
    out.filter = run_prep(config);
    out.segments_scored = run_classify(config);
    out.report = run_report(config);
    return out;
}

}  // namespace ppscan::pipeline
