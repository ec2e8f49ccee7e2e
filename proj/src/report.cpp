#include "ppscan/report.hpp"

#include <array>

#include <nlohmann/json.hpp>

#include "ppscan/format.hpp"

namespace ppscan::report {

namespace {

using ingest::AvailabilityClass;
using nlohmann::ordered_json;

const std::array<std::string, 3> kFormatNames = {"csv", "json", "md"};

// Row order of the availability summary table.
const std::array<AvailabilityClass, ingest::kNumAvailabilityClasses> kSummaryOrder = {
    AvailabilityClass::ImageOnly,       AvailabilityClass::NoLinkOrDocument,
    AvailabilityClass::NotEnglish,      AvailabilityClass::AppNotAvailable,
    AvailabilityClass::Text,            AvailabilityClass::Html,
};

std::string dump(const ordered_json& doc) { return doc.dump(2) + "\n"; }

std::string md_row(const std::vector<std::string>& cells) {
    std::string out = "|";
    for (const auto& c : cells) out += " " + c + " |";
    out += "\n";
    return out;
}

std::string md_rule(std::size_t columns, std::size_t left_aligned) {
    std::string out = "|";
    for (std::size_t i = 0; i < columns; ++i)
        out += i < left_aligned ? " --- |" : " ---: |";
    out += "\n";
    return out;
}

}  // namespace

const std::string& format_name(Format f) { return kFormatNames[static_cast<std::size_t>(f)]; }

std::optional<Format> format_from_name(const std::string& name) {
    for (std::size_t i = 0; i < kFormatNames.size(); ++i)
        if (kFormatNames[i] == name) return static_cast<Format>(i);
    if (name == "markdown") return Format::Md;
    return std::nullopt;
}

std::string render_availability(const ingest::AvailabilitySummary& summary, Format f) {
    switch (f) {
        case Format::Csv: {
            std::string out = "availability,included,count\n";
            for (AvailabilityClass c : kSummaryOrder)
                out += csv_escape(availability_display_name(c)) + "," +
                       (ingest::is_included(c) ? "yes" : "no") + "," +
                       std::to_string(summary.count(c)) + "\n";
            out += "Total,," + std::to_string(summary.total()) + "\n";
            out += "Included,," + std::to_string(summary.included()) + "\n";
            return out;
        }
        case Format::Json: {
            ordered_json doc;
            ordered_json rows = ordered_json::array();
            for (AvailabilityClass c : kSummaryOrder) {
                ordered_json row;
                row["availability"] = availability_display_name(c);
                row["included"] = ingest::is_included(c);
                row["count"] = summary.count(c);
                rows.push_back(std::move(row));
            }
            doc["rows"] = std::move(rows);
            doc["total"] = summary.total();
            doc["included"] = summary.included();
            return dump(doc);
        }
        case Format::Md: {
            std::string out = "# Policy availability\n\n";
            out += md_row({"Availability", "Included", "Count"});
            out += md_rule(3, 1);
            for (AvailabilityClass c : kSummaryOrder)
                out += md_row({availability_display_name(c),
                               ingest::is_included(c) ? "yes" : "no",
                               with_thousands(std::to_string(summary.count(c)))});
            out += md_row({"**Total**", "", with_thousands(std::to_string(summary.total()))});
            out += md_row({"**Included**", "", with_thousands(std::to_string(summary.included()))});
            return out;
        }
    }
    return {};
}

std::string render_corpus_stats(const metrics::CorpusStats& stats, Format f) {
    switch (f) {
        case Format::Csv: {
            std::string out = "statistic,value\n";
            out += "Policies," + std::to_string(stats.policy_count) + "\n";
            out += "Paragraphs," + std::to_string(stats.total_paragraphs) + "\n";
            out += "Avg. Paragraphs," + format_2dp(stats.avg_paragraphs) + "\n";
            out += "Words," + std::to_string(stats.total_words) + "\n";
            out += "Avg. Words," + format_2dp(stats.avg_words) + "\n";
            return out;
        }
        case Format::Json: {
            ordered_json doc;
            doc["policies"] = stats.policy_count;
            doc["paragraphs"] = stats.total_paragraphs;
            doc["avg_paragraphs"] = format_2dp(stats.avg_paragraphs);
            doc["words"] = stats.total_words;
            doc["avg_words"] = format_2dp(stats.avg_words);
            return dump(doc);
        }
        case Format::Md: {
            std::string out = "# Corpus statistics\n\n";
            out += md_row({"Statistic", "Value"});
            out += md_rule(2, 1);
            out += md_row({"Policies", with_thousands(std::to_string(stats.policy_count))});
            out += md_row({"Paragraphs", with_thousands(std::to_string(stats.total_paragraphs))});
            out += md_row({"Avg. Paragraphs", with_thousands(format_2dp(stats.avg_paragraphs))});
            out += md_row({"Words", with_thousands(std::to_string(stats.total_words))});
            out += md_row({"Avg. Words", with_thousands(format_2dp(stats.avg_words))});
            return out;
        }
    }
    return {};
}

std::string render_group_stats(const std::vector<metrics::GroupStats>& groups, Format f) {
    switch (f) {
        case Format::Csv: {
            std::string out = "group,policies,paragraphs,mean_paragraphs,words,mean_words\n";
            for (const auto& g : groups)
                out += csv_escape(g.group) + "," + std::to_string(g.policy_count) + "," +
                       std::to_string(g.paragraphs) + "," + format_2dp(g.mean_paragraphs) + "," +
                       std::to_string(g.words) + "," + format_2dp(g.mean_words) + "\n";
            return out;
        }
        case Format::Json: {
            ordered_json rows = ordered_json::array();
            for (const auto& g : groups) {
                ordered_json row;
                row["group"] = g.group;
                row["policies"] = g.policy_count;
                row["paragraphs"] = g.paragraphs;
                row["mean_paragraphs"] = format_2dp(g.mean_paragraphs);
                row["words"] = g.words;
                row["mean_words"] = format_2dp(g.mean_words);
                rows.push_back(std::move(row));
            }
            ordered_json doc;
            doc["groups"] = std::move(rows);
            return dump(doc);
        }
        case Format::Md: {
            std::string out = "# Group statistics\n\n";
            out += md_row({"Group", "Policies", "Paragraphs", "μ Paragraphs", "Words", "μ Words"});
            out += md_rule(6, 1);
            for (const auto& g : groups)
                out += md_row({g.group, std::to_string(g.policy_count),
                               with_thousands(std::to_string(g.paragraphs)),
                               with_thousands(format_2dp(g.mean_paragraphs)),
                               with_thousands(std::to_string(g.words)),
                               with_thousands(format_2dp(g.mean_words))});
            return out;
        }
    }
    return {};
}

std::string render_filter_report(const prep::FilterReport& report, Format f) {
    switch (f) {
        case Format::Csv: {
            std::string out = "counter,value\n";
            out += "input_documents," + std::to_string(report.input_documents) + "\n";
            out += "excluded_no_privacy," + std::to_string(report.excluded_no_privacy) + "\n";
            out += "excluded_low_keyterms," + std::to_string(report.excluded_low_keyterms) + "\n";
            out += "kept_documents," + std::to_string(report.kept_documents) + "\n";
            out += "dropped_short_paragraphs," + std::to_string(report.dropped_short_paragraphs) +
                   "\n";
            return out;
        }
        case Format::Json: {
            ordered_json doc;
            doc["input_documents"] = report.input_documents;
            doc["excluded_no_privacy"] = report.excluded_no_privacy;
            doc["excluded_low_keyterms"] = report.excluded_low_keyterms;
            doc["kept_documents"] = report.kept_documents;
            doc["dropped_short_paragraphs"] = report.dropped_short_paragraphs;
            return dump(doc);
        }
        case Format::Md: {
            std::string out = "# Relevance filtering\n\n";
            out += md_row({"Counter", "Value"});
            out += md_rule(2, 1);
            out += md_row({"Input documents", std::to_string(report.input_documents)});
            out += md_row({"Excluded: no \"privacy\" term",
                           std::to_string(report.excluded_no_privacy)});
            out += md_row({"Excluded: key term below twice",
                           std::to_string(report.excluded_low_keyterms)});
            out += md_row({"Kept documents", std::to_string(report.kept_documents)});
            out += md_row({"Dropped short paragraphs",
                           std::to_string(report.dropped_short_paragraphs)});
            return out;
        }
    }
    return {};
}

std::string render_metric_table(const metrics::MetricTable& table, Format f) {
    switch (f) {
        case Format::Csv: {
            std::string out = "category,percentage\n";
            for (Category c : kAllCategories)
                out += csv_escape(category_display_name(c)) + "," +
                       format_2dp(table.value(c)) + "\n";
            out += "Average," + format_2dp(table.average) + "\n";
            out += "Overall," + format_2dp(table.overall) + "\n";
            return out;
        }
        case Format::Json: {
            ordered_json doc;
            doc["metric"] = metric_kind_name(table.kind);
            ordered_json values = ordered_json::object();
            for (Category c : kAllCategories)
                values[category_name(c)] = format_2dp(table.value(c));
            doc["values"] = std::move(values);
            doc["average"] = format_2dp(table.average);
            doc["overall"] = format_2dp(table.overall);
            return dump(doc);
        }
        case Format::Md: {
            std::string out = "# " + metric_kind_display(table.kind) + "\n\n";
            out += md_row({"Category", "%"});
            out += md_rule(2, 1);
            for (Category c : kAllCategories)
                out += md_row({category_display_name(c), format_2dp(table.value(c))});
            out += md_row({"**Average**", format_2dp(table.average)});
            out += md_row({"**Overall**", format_2dp(table.overall)});
            return out;
        }
    }
    return {};
}

std::string render_comparison(const metrics::ComparisonTable& table, Format f) {
    auto cells = [](const metrics::ComparisonEntry& e) {
        return std::array<std::string, 5>{cents_to_string(e.ours), cents_to_string(e.free_ref),
                                          format_delta(e.delta_free),
                                          cents_to_string(e.premium_ref),
                                          format_delta(e.delta_premium)};
    };
    switch (f) {
        case Format::Csv: {
            std::string out = "category,ours,free,delta_free,premium,delta_premium\n";
            for (Category c : kAllCategories) {
                auto v = cells(table.row(c));
                out += csv_escape(category_display_name(c));
                for (const auto& cell : v) out += "," + cell;
                out += "\n";
            }
            auto avg = cells(table.average);
            out += "Average";
            for (const auto& cell : avg) out += "," + cell;
            out += "\n";
            if (table.overall) {
                auto ov = cells(*table.overall);
                out += "Overall";
                for (const auto& cell : ov) out += "," + cell;
                out += "\n";
            }
            return out;
        }
        case Format::Json: {
            auto entry = [&cells](const metrics::ComparisonEntry& e) {
                auto v = cells(e);
                ordered_json row;
                row["ours"] = v[0];
                row["free"] = v[1];
                row["delta_free"] = v[2];
                row["premium"] = v[3];
                row["delta_premium"] = v[4];
                return row;
            };
            ordered_json doc;
            doc["metric"] = metric_kind_name(table.kind);
            doc["free_source"] = table.free_source;
            doc["premium_source"] = table.premium_source;
            ordered_json rows = ordered_json::object();
            for (Category c : kAllCategories) rows[category_name(c)] = entry(table.row(c));
            doc["rows"] = std::move(rows);
            doc["average"] = entry(table.average);
            if (table.overall) doc["overall"] = entry(*table.overall);
            return dump(doc);
        }
        case Format::Md: {
            std::string out = "# " + metrics::metric_kind_display(table.kind) +
                              " vs. " + table.free_source + " / " + table.premium_source +
                              "\n\n";
            out += md_row({"Category", "Ours", "Free", "Δ_F", "Premium", "Δ_P"});
            out += md_rule(6, 1);
            for (Category c : kAllCategories) {
                auto v = cells(table.row(c));
                out += md_row({category_display_name(c), v[0], v[1], v[2], v[3], v[4]});
            }
            auto avg = cells(table.average);
            out += md_row({"**Average**", avg[0], avg[1], avg[2], avg[3], avg[4]});
            if (table.overall) {
                auto ov = cells(*table.overall);
                out += md_row({"**Overall**", ov[0], ov[1], ov[2], ov[3], ov[4]});
            }
            return out;
        }
    }
    return {};
}

std::string render_eval_report(const classify::EvalReport& report, Format f) {
    auto metric = [](double v) { return format_fixed(v, 4); };
    switch (f) {
        case Format::Csv: {
            std::string out = "category,tp,fp,tn,fn,accuracy,precision,recall,f1\n";
            for (Category c : kAllCategories) {
                const auto& e = report.category(c);
                out += csv_escape(category_display_name(c)) + "," + std::to_string(e.tp) + "," +
                       std::to_string(e.fp) + "," + std::to_string(e.tn) + "," +
                       std::to_string(e.fn) + "," + metric(e.accuracy) + "," +
                       metric(e.precision) + "," + metric(e.recall) + "," + metric(e.f1) + "\n";
            }
            out += "Overall,,,,," + metric(report.overall) + ",,,\n";
            return out;
        }
        case Format::Json: {
            ordered_json doc;
            doc["segments"] = report.segment_count;
            ordered_json cats = ordered_json::object();
            for (Category c : kAllCategories) {
                const auto& e = report.category(c);
                ordered_json row;
                row["tp"] = e.tp;
                row["fp"] = e.fp;
                row["tn"] = e.tn;
                row["fn"] = e.fn;
                row["accuracy"] = metric(e.accuracy);
                row["precision"] = metric(e.precision);
                row["recall"] = metric(e.recall);
                row["f1"] = metric(e.f1);
                cats[category_name(c)] = std::move(row);
            }
            doc["categories"] = std::move(cats);
            doc["overall_accuracy"] = metric(report.overall);
            return dump(doc);
        }
        case Format::Md: {
            std::string out = "# Evaluation\n\n";
            out += md_row({"Category", "TP", "FP", "TN", "FN", "Acc", "P", "R", "F1"});
            out += md_rule(9, 1);
            for (Category c : kAllCategories) {
                const auto& e = report.category(c);
                out += md_row({category_display_name(c), std::to_string(e.tp),
                               std::to_string(e.fp), std::to_string(e.tn), std::to_string(e.fn),
                               metric(e.accuracy), metric(e.precision), metric(e.recall),
                               metric(e.f1)});
            }
            out += md_row({"**Overall**", "", "", "", "", metric(report.overall), "", "", ""});
            return out;
        }
    }
    return {};
}

}  // namespace ppscan::report
