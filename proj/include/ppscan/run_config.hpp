#ifndef PPSCAN_RUN_CONFIG_HPP
#define PPSCAN_RUN_CONFIG_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ppscan/fetch.hpp"
#include "ppscan/label_scores.hpp"
#include "ppscan/metrics.hpp"
#include "ppscan/report.hpp"

namespace ppscan {

// Free/premium reference files for one metric kind; empty paths mean "not
// configured" and suppress the comparison table.
struct ReferencePair {
    std::filesystem::path free;
    std::filesystem::path premium;

    bool configured() const { return !free.empty() && !premium.empty(); }
};

// Everything a pipeline run needs. Loaded from a versioned JSON config file,
// then overridden by CLI flags. With the seed fixed, a run is deterministic.
struct RunConfig {
    std::filesystem::path corpus_dir = "corpus";
    std::filesystem::path manifest;
    std::filesystem::path stopwords;
    std::filesystem::path lexicon;
    std::filesystem::path model;  // empty: lexicon backend; *.onnx: external; else linear bundle

    std::optional<double> threshold;                  // uniform override
    std::map<std::string, double> category_thresholds;  // per-category overrides

    ingest::FetchOptions fetch;
    std::uint32_t seed = 1;
    std::vector<report::Format> formats = {report::Format::Csv, report::Format::Json,
                                           report::Format::Md};

    // Indexed by metrics::MetricKind.
    std::array<ReferencePair, 3> references{};

    // Applies the uniform and per-category overrides on top of `base`.
    classify::ThresholdVector resolve_thresholds(const classify::ThresholdVector& base) const;
};

// Parses config-file JSON onto `base`. Unknown keys are rejected so typos
// fail loudly; "version" must be 1 when present.
RunConfig parse_run_config(const nlohmann::json& doc, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {});

}  // namespace ppscan

#endif
