#include "ppscan/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

#include "ppscan/errors.hpp"
#include "ppscan/format.hpp"

namespace ppscan::metrics {

CorpusStats corpus_stats(const std::vector<prep::PreparedDocument>& docs) {
    CorpusStats s;
    for (const auto& doc : docs) {
        if (!doc.kept) continue;
        ++s.policy_count;
        for (const auto& seg : doc.segments) {
            if (!seg.kept) continue;
            ++s.total_paragraphs;
            s.total_words += seg.paragraph.word_count;
        }
    }
    if (s.policy_count == 0) throw EmptyCorpus("corpus statistics");
    s.avg_paragraphs = static_cast<double>(s.total_paragraphs) /
                       static_cast<double>(s.policy_count);
    s.avg_words = static_cast<double>(s.total_words) / static_cast<double>(s.policy_count);
    return s;
}

CorpusStats corpus_stats_from_totals(std::size_t policies, std::size_t paragraphs,
                                     std::size_t words) {
    if (policies == 0) throw EmptyCorpus("corpus statistics");
    CorpusStats s;
    s.policy_count = policies;
    s.total_paragraphs = paragraphs;
    s.total_words = words;
    s.avg_paragraphs = static_cast<double>(paragraphs) / static_cast<double>(policies);
    s.avg_words = static_cast<double>(words) / static_cast<double>(policies);
    return s;
}

std::vector<GroupStats> group_stats(const std::vector<prep::PreparedDocument>& docs) {
    std::map<std::string, GroupStats> by_group;
    for (const auto& doc : docs) {
        if (!doc.kept) continue;
        GroupStats& g = by_group[doc.group];
        g.group = doc.group;
        ++g.policy_count;
        for (const auto& seg : doc.segments) {
            if (!seg.kept) continue;
            ++g.paragraphs;
            g.words += seg.paragraph.word_count;
        }
    }

    std::vector<GroupStats> out;
    out.reserve(by_group.size());
    for (auto& [name, g] : by_group) {
        g.mean_paragraphs = static_cast<double>(g.paragraphs) /
                            static_cast<double>(g.policy_count);
        g.mean_words = static_cast<double>(g.words) / static_cast<double>(g.policy_count);
        out.push_back(std::move(g));
    }
    std::sort(out.begin(), out.end(), [](const GroupStats& a, const GroupStats& b) {
        if (a.policy_count != b.policy_count) return a.policy_count > b.policy_count;
        return a.group < b.group;
    });
    return out;
}

GroupStats group_stats_from_totals(const std::string& group, std::size_t policies,
                                   std::size_t paragraphs, std::size_t words) {
    if (policies == 0) throw EmptyCorpus("group statistics for " + group);
    GroupStats g;
    g.group = group;
    g.policy_count = policies;
    g.paragraphs = paragraphs;
    g.words = words;
    g.mean_paragraphs = static_cast<double>(paragraphs) / static_cast<double>(policies);
    g.mean_words = static_cast<double>(words) / static_cast<double>(policies);
    return g;
}

namespace {

const std::array<std::string, 3> kKindNames = {"positive_segments", "highlighted_segments",
                                               "highlighted_words"};
const std::array<std::string, 3> kKindDisplay = {"Positive Segments", "Highlighted Segments",
                                                 "Highlighted Words"};

double percentage(std::size_t num, std::size_t den) {
    return 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

double mean9(const std::array<double, kNumCategories>& values) {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(kNumCategories);
}

}  // namespace

const std::string& metric_kind_name(MetricKind k) {
    return kKindNames[static_cast<std::size_t>(k)];
}

const std::string& metric_kind_display(MetricKind k) {
    return kKindDisplay[static_cast<std::size_t>(k)];
}

MetricKind metric_kind_from_name(const std::string& name) {
    for (std::size_t i = 0; i < kKindNames.size(); ++i)
        if (kKindNames[i] == name) return static_cast<MetricKind>(i);
    throw Error("unknown metric kind: " + name);
}

MetricTable positive_segments(const std::vector<ScoredPolicy>& corpus) {
    if (corpus.empty()) throw EmptyCorpus("positive-segment percentages");

    MetricTable t;
    t.kind = MetricKind::PositiveSegments;
    std::array<std::size_t, kNumCategories> policies_with{};
    std::size_t policies_with_any = 0;
    for (const auto& policy : corpus) {
        std::array<bool, kNumCategories> seen{};
        bool any = false;
        for (const auto& seg : policy.segments)
            for (std::size_t c = 0; c < kNumCategories; ++c)
                if (seg.decisions[c]) {
                    seen[c] = true;
                    any = true;
                }
        for (std::size_t c = 0; c < kNumCategories; ++c)
            if (seen[c]) ++policies_with[c];
        if (any) ++policies_with_any;
    }
    for (std::size_t c = 0; c < kNumCategories; ++c)
        t.values[c] = percentage(policies_with[c], corpus.size());
    t.average = mean9(t.values);
    t.overall = percentage(policies_with_any, corpus.size());
    return t;
}

MetricTable highlighted_segments(const std::vector<ScoredPolicy>& corpus) {
    std::size_t total = 0;
    std::array<std::size_t, kNumCategories> labeled{};
    std::size_t labeled_any = 0;
    for (const auto& policy : corpus)
        for (const auto& seg : policy.segments) {
            ++total;
            bool any = false;
            for (std::size_t c = 0; c < kNumCategories; ++c)
                if (seg.decisions[c]) {
                    ++labeled[c];
                    any = true;
                }
            if (any) ++labeled_any;
        }
    if (total == 0) throw EmptyCorpus("highlighted-segment percentages");

    MetricTable t;
    t.kind = MetricKind::HighlightedSegments;
    for (std::size_t c = 0; c < kNumCategories; ++c) t.values[c] = percentage(labeled[c], total);
    t.average = mean9(t.values);
    t.overall = percentage(labeled_any, total);
    return t;
}

MetricTable highlighted_words(const std::vector<ScoredPolicy>& corpus) {
    std::size_t total_words = 0;
    std::array<std::size_t, kNumCategories> labeled_words{};
    std::size_t labeled_any_words = 0;
    for (const auto& policy : corpus)
        for (const auto& seg : policy.segments) {
            total_words += seg.word_count;
            bool any = false;
            for (std::size_t c = 0; c < kNumCategories; ++c)
                if (seg.decisions[c]) {
                    labeled_words[c] += seg.word_count;
                    any = true;
                }
            if (any) labeled_any_words += seg.word_count;
        }
    if (total_words == 0) throw EmptyCorpus("highlighted-word percentages");

    MetricTable t;
    t.kind = MetricKind::HighlightedWords;
    for (std::size_t c = 0; c < kNumCategories; ++c)
        t.values[c] = percentage(labeled_words[c], total_words);
    t.average = mean9(t.values);
    t.overall = percentage(labeled_any_words, total_words);
    return t;
}

double ReferenceTable::average() const { return mean9(values); }

ReferenceTable ReferenceTable::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open reference table: " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw Error("reference table " + path.string() + " is not valid JSON: " + e.what());
    }

    ReferenceTable ref;
    if (!doc.contains("metric_kind") || !doc["metric_kind"].is_string())
        throw Error("reference table " + path.string() + " lacks \"metric_kind\"");
    ref.kind = metric_kind_from_name(doc["metric_kind"].get<std::string>());
    ref.source_name = doc.value("source_name", path.stem().string());
    if (!doc.contains("values") || !doc["values"].is_object())
        throw Error("reference table " + path.string() + " lacks a \"values\" object");

    const auto& values = doc["values"];
    for (Category c : kAllCategories) {
        const std::string& name = category_name(c);
        if (!values.contains(name)) throw MissingReferenceCategory(name);
        if (!values[name].is_number())
            throw Error("reference value for " + name + " is not a number");
        double v = values[name].get<double>();
        if (v < 0.0 || v > 100.0)
            throw Error("reference value for " + name + " is outside [0, 100]");
        ref.values[category_index(c)] = v;
    }
    if (doc.contains("overall")) {
        if (!doc["overall"].is_number())
            throw Error("reference overall value is not a number");
        ref.overall = doc["overall"].get<double>();
    }
    return ref;
}

MetricTable metric_table_from_reference(const ReferenceTable& ref) {
    MetricTable t;
    t.kind = ref.kind;
    t.values = ref.values;
    t.average = ref.average();
    t.overall = ref.overall.value_or(0.0);
    return t;
}

ComparisonTable compare(const MetricTable& ours, const ReferenceTable& free_ref,
                        const ReferenceTable& premium_ref) {
    if (free_ref.kind != ours.kind || premium_ref.kind != ours.kind)
        throw Error("reference tables measure a different metric than the computed table");

    auto entry = [](double ours_v, double free_v, double premium_v) {
        ComparisonEntry e;
        e.ours = to_cents(ours_v);
        e.free_ref = to_cents(free_v);
        e.premium_ref = to_cents(premium_v);
        e.delta_free = e.ours - e.free_ref;
        e.delta_premium = e.ours - e.premium_ref;
        return e;
    };

    ComparisonTable t;
    t.kind = ours.kind;
    t.free_source = free_ref.source_name;
    t.premium_source = premium_ref.source_name;
    for (std::size_t c = 0; c < kNumCategories; ++c)
        t.rows[c] = entry(ours.values[c], free_ref.values[c], premium_ref.values[c]);
    t.average = entry(ours.average, free_ref.average(), premium_ref.average());
    if (free_ref.overall && premium_ref.overall)
        t.overall = entry(ours.overall, *free_ref.overall, *premium_ref.overall);
    return t;
}

}  // namespace ppscan::metrics
