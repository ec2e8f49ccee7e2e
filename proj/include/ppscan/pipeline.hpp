#ifndef PPSCAN_PIPELINE_HPP
#define PPSCAN_PIPELINE_HPP

#include <cstddef>
#include <filesystem>
#include <vector>

#include "ppscan/corpus_store.hpp"
#include "ppscan/fetch.hpp"
#include "ppscan/metrics.hpp"
#include "ppscan/model_bundle.hpp"
#include "ppscan/prep.hpp"
#include "ppscan/run_config.hpp"

// The pipeline stages behind the CLI subcommands, callable in-process so
// tests can drive them against fixture corpora and stub fetchers. Each stage
// reads its inputs from the corpus store and writes its outputs atomically,
// so reruns are safe at any point.

namespace ppscan::pipeline {

struct IngestOutcome {
    ingest::AvailabilitySummary summary;
    std::size_t records = 0;
};

// Manifest -> fetch -> triage -> store. Per-record fetch failures become
// data (NoLinkOrDocument records); manifest problems throw.
IngestOutcome run_ingest(const RunConfig& config, ingest::HttpFetcher& fetcher);
IngestOutcome run_ingest(const RunConfig& config);  // over a real HTTP client

// Extracts documents for every included record; returns how many were
// written.
std::size_t run_extract(const RunConfig& config);

// Relevance filter + tokenization over all extracted documents.
prep::FilterReport run_prep(const RunConfig& config);

// Backend selection: empty model path loads the configured lexicon, a
// .onnx path loads the external backend, anything else a linear bundle.
// Threshold overrides from the config are applied on top.
classify::ModelBundle load_backend(const RunConfig& config);

// Scores the kept segments of kept documents; returns segments scored.
std::size_t run_classify(const RunConfig& config);

struct ReportOutcome {
    prep::FilterReport filter;
    metrics::CorpusStats stats;
    std::vector<metrics::GroupStats> groups;
    std::vector<std::filesystem::path> files;
};

// Aggregates stored prep/score results into the report bundle under
// <corpus>/reports. Comparison tables are included for every metric whose
// free+premium reference files are configured.
ReportOutcome run_report(const RunConfig& config);

struct AnalyzeOutcome {
    std::size_t documents_extracted = 0;
    prep::FilterReport filter;
    std::size_t segments_scored = 0;
    ReportOutcome report;
};

// extract -> prep -> classify -> report over an already-ingested corpus.
AnalyzeOutcome run_analyze(const RunConfig& config);

}  // namespace ppscan::pipeline

#endif
