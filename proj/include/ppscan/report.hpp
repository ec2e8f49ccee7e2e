#ifndef PPSCAN_REPORT_HPP
#define PPSCAN_REPORT_HPP

#include <optional>
#include <string>
#include <vector>

#include "ppscan/evaluate.hpp"
#include "ppscan/metrics.hpp"
#include "ppscan/policy_record.hpp"
#include "ppscan/prep.hpp"

namespace ppscan::report {

enum class Format { Csv, Json, Md };

const std::string& format_name(Format f);  // "csv", "json", "md" (also the extension)
std::optional<Format> format_from_name(const std::string& name);

// Each renderer returns the complete file contents for one artifact.
// Everything is deterministic: fixed row order (categories canonical,
// availability rows in the summary-table order, groups pre-sorted), 2-decimal
// half-up values, and explicit signs on delta columns.
std::string render_availability(const ingest::AvailabilitySummary& summary, Format f);
std::string render_corpus_stats(const metrics::CorpusStats& stats, Format f);
std::string render_group_stats(const std::vector<metrics::GroupStats>& groups, Format f);
std::string render_filter_report(const prep::FilterReport& report, Format f);
std::string render_metric_table(const metrics::MetricTable& table, Format f);
std::string render_comparison(const metrics::ComparisonTable& table, Format f);
std::string render_eval_report(const classify::EvalReport& report, Format f);

}  // namespace ppscan::report

#endif
