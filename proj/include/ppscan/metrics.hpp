#ifndef PPSCAN_METRICS_HPP
#define PPSCAN_METRICS_HPP

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ppscan/category.hpp"
#include "ppscan/label_scores.hpp"
#include "ppscan/prep.hpp"

namespace ppscan::metrics {

// Corpus-wide totals and averages over kept documents / kept paragraphs.
// Averages are kept at full precision; rounding happens at table emission.
struct CorpusStats {
    std::size_t policy_count = 0;
    std::size_t total_paragraphs = 0;
    std::size_t total_words = 0;
    double avg_paragraphs = 0.0;
    double avg_words = 0.0;
};

CorpusStats corpus_stats(const std::vector<prep::PreparedDocument>& docs);

// Same arithmetic from externally supplied totals (e.g. replaying published
// figures). Throws EmptyCorpus when policies == 0, since the averages are
// undefined; totals of an empty corpus are trivially zero.
CorpusStats corpus_stats_from_totals(std::size_t policies, std::size_t paragraphs,
                                     std::size_t words);

struct GroupStats {
    std::string group;
    std::size_t policy_count = 0;
    std::size_t paragraphs = 0;
    std::size_t words = 0;
    double mean_paragraphs = 0.0;
    double mean_words = 0.0;
};

// Per-group sums and means, sorted by policy count descending, ties by name.
std::vector<GroupStats> group_stats(const std::vector<prep::PreparedDocument>& docs);

GroupStats group_stats_from_totals(const std::string& group, std::size_t policies,
                                   std::size_t paragraphs, std::size_t words);

// A kept segment with its classifier decisions, the input to the three
// metric families.
struct ScoredSegment {
    std::size_t paragraph_index = 0;
    std::size_t word_count = 0;
    classify::DecisionVector decisions{};
};

struct ScoredPolicy {
    std::string app_id;
    std::string group;
    std::vector<ScoredSegment> segments;
};

enum class MetricKind { PositiveSegments, HighlightedSegments, HighlightedWords };

const std::string& metric_kind_name(MetricKind k);      // "positive_segments", ...
const std::string& metric_kind_display(MetricKind k);   // "Positive Segments", ...
MetricKind metric_kind_from_name(const std::string& name);

// Per-category percentages plus the two summary rows every table carries:
//   average — unweighted mean of the nine category values
//   overall — union-based: the share of policies/segments/words touched by
//             at least one category, so multi-labeling cannot double-count
struct MetricTable {
    MetricKind kind = MetricKind::PositiveSegments;
    std::array<double, kNumCategories> values{};
    double average = 0.0;
    double overall = 0.0;

    double value(Category c) const { return values[category_index(c)]; }
};

// Share of policies containing at least one positive segment per category.
MetricTable positive_segments(const std::vector<ScoredPolicy>& corpus);

// Share of kept segments assigned to each category.
MetricTable highlighted_segments(const std::vector<ScoredPolicy>& corpus);

// Word-weighted variant: share of kept-segment words in each category.
MetricTable highlighted_words(const std::vector<ScoredPolicy>& corpus);

// External study columns for the same metric, shipped as versioned JSON:
//   {"metric_kind": ..., "source_name": ..., "values": {category: pct},
//    "overall": pct}            -- "overall" only when the source prints one
struct ReferenceTable {
    MetricKind kind = MetricKind::PositiveSegments;
    std::string source_name;
    std::array<double, kNumCategories> values{};
    std::optional<double> overall;

    double average() const;  // unweighted mean of the nine values
    static ReferenceTable load(const std::filesystem::path& path);
};

// Treats a reference column as a computed table (used to replay published
// columns through compare()).
MetricTable metric_table_from_reference(const ReferenceTable& ref);

// One comparison row, everything in display cents (value * 100 rounded
// half-up) so the deltas are exact differences of the printed numbers.
struct ComparisonEntry {
    std::int64_t ours = 0;
    std::int64_t free_ref = 0;
    std::int64_t delta_free = 0;
    std::int64_t premium_ref = 0;
    std::int64_t delta_premium = 0;
};

struct ComparisonTable {
    MetricKind kind = MetricKind::PositiveSegments;
    std::string free_source;
    std::string premium_source;
    std::array<ComparisonEntry, kNumCategories> rows{};
    ComparisonEntry average;
    std::optional<ComparisonEntry> overall;  // present when both references carry one

    const ComparisonEntry& row(Category c) const { return rows[category_index(c)]; }
};

ComparisonTable compare(const MetricTable& ours, const ReferenceTable& free_ref,
                        const ReferenceTable& premium_ref);

}  // namespace ppscan::metrics

#endif
