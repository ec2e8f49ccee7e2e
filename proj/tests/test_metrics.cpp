#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "helpers.hpp"
#include "ppscan/errors.hpp"
#include "ppscan/evaluate.hpp"
#include "ppscan/format.hpp"
#include "ppscan/metrics.hpp"
#include "ppscan/policy_record.hpp"
#include "ppscan/report.hpp"

using namespace ppscan;
using namespace ppscan::metrics;
using doctest::Approx;

namespace {

prep::TokenizedSegment kept_segment(std::size_t index, std::size_t words) {
    prep::TokenizedSegment seg;
    seg.paragraph.index = index;
    seg.paragraph.word_count = words;
    seg.kept = true;
    return seg;
}

prep::PreparedDocument make_doc(const std::string& app_id, const std::string& group,
                                const std::vector<std::size_t>& segment_words) {
    prep::PreparedDocument doc;
    doc.app_id = app_id;
    doc.group = group;
    doc.kept = true;
    for (std::size_t i = 0; i < segment_words.size(); ++i)
        doc.segments.push_back(kept_segment(i, segment_words[i]));
    return doc;
}

ScoredSegment scored(std::size_t words, std::initializer_list<Category> cats) {
    ScoredSegment seg;
    seg.word_count = words;
    for (Category c : cats) seg.decisions[category_index(c)] = true;
    return seg;
}

// Three policies over two active categories; worked through by hand below.
std::vector<ScoredPolicy> tiny_scored_corpus() {
    std::vector<ScoredPolicy> corpus(3);
    corpus[0].app_id = "app.one";
    corpus[0].group = "Games";
    corpus[0].segments = {scored(10, {Category::FirstPartyUse}),
                          scored(30, {Category::FirstPartyUse, Category::UserChoice})};
    corpus[1].app_id = "app.two";
    corpus[1].group = "Tools";
    corpus[1].segments = {scored(40, {})};
    corpus[2].app_id = "app.three";
    corpus[2].group = "Games";
    corpus[2].segments = {scored(20, {Category::UserChoice})};
    return corpus;
}

}  // namespace

TEST_CASE("rounding helpers: half-up at two decimals") {
    CHECK(to_cents(104.729166) == 10473);
    CHECK(to_cents(3875.9375) == 387594);
    CHECK(to_cents(0.125) == 13);  // 12.5 exactly representable; rounds up
    CHECK(to_cents(0.0) == 0);
    CHECK(to_cents(200.0 / 3.0) == 6667);

    CHECK(cents_to_string(10473) == "104.73");
    CHECK(cents_to_string(-2135) == "-21.35");
    CHECK(cents_to_string(0) == "0.00");
    CHECK(cents_to_string(5) == "0.05");
    CHECK(cents_to_string(387594) == "3875.94");

    CHECK(format_2dp(25135.0 / 240.0) == "104.73");
    CHECK(format_2dp(930225.0 / 240.0) == "3875.94");
    CHECK(format_2dp(0.125) == "0.13");
    CHECK(format_2dp(66.0 + 1.0 / 12.0) == "66.08");

    CHECK(format_delta(1018) == "+10.18");
    CHECK(format_delta(-2135) == "-21.35");
    CHECK(format_delta(0) == "0.00");

    CHECK(format_fixed(29.0 / 30.0, 4) == "0.9667");
    CHECK(format_fixed(1.0, 4) == "1.0000");
    CHECK(format_fixed(0.75, 2) == "0.75");
    CHECK(format_fixed(-0.5, 2) == "-0.50");
    CHECK(format_fixed(2.5, 0) == "3");
}

TEST_CASE("thousands separators touch only the integer part") {
    CHECK(with_thousands("3875.94") == "3,875.94");
    CHECK(with_thousands("930225") == "930,225");
    CHECK(with_thousands("25135") == "25,135");
    CHECK(with_thousands("104.73") == "104.73");
    CHECK(with_thousands("1234567.89") == "1,234,567.89");
    CHECK(with_thousands("-1234") == "-1,234");
    CHECK(with_thousands("123") == "123");
    CHECK(with_thousands("") == "");
}

TEST_CASE("csv_escape quotes only when needed") {
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("a,b") == "\"a,b\"");
    CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_escape("line\nbreak") == "\"line\nbreak\"");
}

TEST_CASE("corpus averages reproduce the published dataset statistics") {
    // 240 policies, 25,135 paragraphs, 930,225 words.
    CorpusStats s = corpus_stats_from_totals(240, 25135, 930225);
    CHECK(format_2dp(s.avg_paragraphs) == "104.73");
    CHECK(format_2dp(s.avg_words) == "3875.94");
    CHECK_THROWS_WITH_AS(corpus_stats_from_totals(0, 0, 0),
                         "empty corpus: cannot compute corpus statistics", EmptyCorpus);
}

TEST_CASE("corpus_stats counts kept documents and kept segments only") {
    std::vector<prep::PreparedDocument> docs;
    docs.push_back(make_doc("a", "Games", {10, 20, 30}));
    docs.push_back(make_doc("b", "Tools", {5, 7}));
    prep::TokenizedSegment dropped = kept_segment(3, 99);
    dropped.kept = false;
    docs[1].segments.push_back(dropped);
    prep::PreparedDocument excluded = make_doc("c", "Games", {1000});
    excluded.kept = false;
    docs.push_back(excluded);

    CorpusStats s = corpus_stats(docs);
    CHECK(s.policy_count == 2);
    CHECK(s.total_paragraphs == 5);
    CHECK(s.total_words == 72);
    CHECK(s.avg_paragraphs == Approx(2.5).epsilon(1e-12));
    CHECK(s.avg_words == Approx(36.0).epsilon(1e-12));

    std::vector<prep::PreparedDocument> none = {excluded};
    CHECK_THROWS_AS(corpus_stats(none), EmptyCorpus);
}

TEST_CASE("group means reproduce the published group rows") {
    GroupStats education = group_stats_from_totals("Education", 48, 3172, 122376);
    CHECK(format_2dp(education.mean_paragraphs) == "66.08");
    CHECK(format_2dp(education.mean_words) == "2549.50");

    GroupStats travel = group_stats_from_totals("Travel & Maps", 1, 25, 393);
    CHECK(format_2dp(travel.mean_paragraphs) == "25.00");
    CHECK(format_2dp(travel.mean_words) == "393.00");

    GroupStats games = group_stats_from_totals("Games", 30, 7873, 221499);
    CHECK(format_2dp(games.mean_paragraphs) == "262.43");
    CHECK(format_2dp(games.mean_words) == "7383.30");

    GroupStats social = group_stats_from_totals("Social & Comm.", 16, 359, 14527);
    CHECK(format_2dp(social.mean_paragraphs) == "22.44");
    CHECK(format_2dp(social.mean_words) == "907.94");

    GroupStats simulation = group_stats_from_totals("Simulation", 28, 1441, 56676);
    CHECK(format_2dp(simulation.mean_words) == "2024.14");

    CHECK_THROWS_WITH_AS(group_stats_from_totals("Empty", 0, 0, 0),
                         "empty corpus: cannot compute group statistics for Empty", EmptyCorpus);
}

TEST_CASE("group_stats sorts by size descending with name tiebreak") {
    std::vector<prep::PreparedDocument> docs;
    docs.push_back(make_doc("a1", "Tools", {10}));
    docs.push_back(make_doc("a2", "Tools", {20, 30}));
    docs.push_back(make_doc("b1", "Games", {40}));
    docs.push_back(make_doc("b2", "Games", {50}));
    docs.push_back(make_doc("c1", "Casual", {60}));
    prep::PreparedDocument excluded = make_doc("d1", "Books", {70});
    excluded.kept = false;
    docs.push_back(excluded);

    std::vector<GroupStats> groups = group_stats(docs);
    REQUIRE(groups.size() == 3);  // Books never appears: its only policy was excluded
    CHECK(groups[0].group == "Games");  // tie with Tools on 2 policies, name breaks it
    CHECK(groups[1].group == "Tools");
    CHECK(groups[2].group == "Casual");

    CHECK(groups[0].policy_count == 2);
    CHECK(groups[0].paragraphs == 2);
    CHECK(groups[0].words == 90);
    CHECK(groups[0].mean_paragraphs == Approx(1.0).epsilon(1e-12));
    CHECK(groups[0].mean_words == Approx(45.0).epsilon(1e-12));
    CHECK(groups[1].words == 60);
    CHECK(groups[1].mean_paragraphs == Approx(1.5).epsilon(1e-12));
}

TEST_CASE("metric kind names") {
    CHECK(metric_kind_name(MetricKind::PositiveSegments) == "positive_segments");
    CHECK(metric_kind_name(MetricKind::HighlightedSegments) == "highlighted_segments");
    CHECK(metric_kind_name(MetricKind::HighlightedWords) == "highlighted_words");
    CHECK(metric_kind_display(MetricKind::PositiveSegments) == "Positive Segments");
    CHECK(metric_kind_display(MetricKind::HighlightedWords) == "Highlighted Words");
    CHECK(metric_kind_from_name("highlighted_segments") == MetricKind::HighlightedSegments);
    CHECK_THROWS_WITH_AS(metric_kind_from_name("sentiment"), "unknown metric kind: sentiment",
                         Error);
}

TEST_CASE("positive segments: share of policies touched per category") {
    MetricTable t = positive_segments(tiny_scored_corpus());
    CHECK(t.kind == MetricKind::PositiveSegments);
    CHECK(t.value(Category::FirstPartyUse) == Approx(100.0 / 3.0).epsilon(1e-12));
    CHECK(t.value(Category::UserChoice) == Approx(200.0 / 3.0).epsilon(1e-12));
    CHECK(t.value(Category::DoNotTrack) == 0.0);
    CHECK(t.average == Approx(100.0 / 9.0).epsilon(1e-12));
    // Union row: two of three policies have some label; no double counting.
    CHECK(t.overall == Approx(200.0 / 3.0).epsilon(1e-12));

    CHECK_THROWS_AS(positive_segments({}), EmptyCorpus);
}

TEST_CASE("highlighted segments: share of kept segments per category") {
    MetricTable t = highlighted_segments(tiny_scored_corpus());
    CHECK(t.kind == MetricKind::HighlightedSegments);
    // 4 segments: FirstPartyUse on 2, UserChoice on 2, 3 carry some label.
    CHECK(t.value(Category::FirstPartyUse) == Approx(50.0).epsilon(1e-12));
    CHECK(t.value(Category::UserChoice) == Approx(50.0).epsilon(1e-12));
    CHECK(t.average == Approx(100.0 / 9.0).epsilon(1e-12));
    CHECK(t.overall == Approx(75.0).epsilon(1e-12));

    std::vector<ScoredPolicy> no_segments(2);
    CHECK_THROWS_AS(highlighted_segments(no_segments), EmptyCorpus);
}

TEST_CASE("highlighted words: word-weighted share per category") {
    MetricTable t = highlighted_words(tiny_scored_corpus());
    CHECK(t.kind == MetricKind::HighlightedWords);
    // 100 words total; FirstPartyUse spans 40, UserChoice 50, labeled union 60.
    CHECK(t.value(Category::FirstPartyUse) == Approx(40.0).epsilon(1e-12));
    CHECK(t.value(Category::UserChoice) == Approx(50.0).epsilon(1e-12));
    CHECK(t.average == Approx(10.0).epsilon(1e-12));
    CHECK(t.overall == Approx(60.0).epsilon(1e-12));

    std::vector<ScoredPolicy> zero_words(1);
    zero_words[0].segments = {scored(0, {Category::FirstPartyUse})};
    CHECK_THROWS_AS(highlighted_words(zero_words), EmptyCorpus);
}

TEST_CASE("reference tables load the shipped study columns") {
    ReferenceTable free_ref =
        ReferenceTable::load(helpers::data_dir() / "reference" / "positive_segments_free.json");
    CHECK(free_ref.kind == MetricKind::PositiveSegments);
    CHECK(free_ref.source_name == "free websites");
    CHECK(free_ref.values[category_index(Category::FirstPartyUse)] == 86.90);
    CHECK(free_ref.values[category_index(Category::DoNotTrack)] == 12.70);
    CHECK_FALSE(free_ref.overall.has_value());  // the positive table publishes no union row
    CHECK(format_2dp(free_ref.average()) == "58.29");

    ReferenceTable seg_free = ReferenceTable::load(helpers::data_dir() / "reference" /
                                                   "highlighted_segments_free.json");
    REQUIRE(seg_free.overall.has_value());
    CHECK(*seg_free.overall == 58.96);

    ReferenceTable words_premium = ReferenceTable::load(helpers::data_dir() / "reference" /
                                                        "highlighted_words_premium.json");
    CHECK(words_premium.kind == MetricKind::HighlightedWords);
    CHECK(format_2dp(words_premium.average()) == "9.40");  // (31.41+...+10.71)/9
}

TEST_CASE("reference table validation errors") {
    auto dir = helpers::temp_dir("reference");
    CHECK_THROWS_AS(ReferenceTable::load(dir / "absent.json"), Error);

    helpers::spit(dir / "broken.json", "{not json");
    CHECK_THROWS_AS(ReferenceTable::load(dir / "broken.json"), Error);

    helpers::spit(dir / "nokind.json", R"({"values": {}})");
    CHECK_THROWS_AS(ReferenceTable::load(dir / "nokind.json"), Error);

    helpers::spit(dir / "badkind.json", R"({"metric_kind": "sentiment", "values": {}})");
    CHECK_THROWS_AS(ReferenceTable::load(dir / "badkind.json"), Error);

    nlohmann::json doc;
    doc["metric_kind"] = "positive_segments";
    doc["values"] = nlohmann::json::object();
    for (Category c : kAllCategories) doc["values"][category_name(c)] = 10.0;
    doc["values"].erase("DataRetention");
    helpers::spit(dir / "missingcat.json", doc.dump());
    CHECK_THROWS_WITH_AS(ReferenceTable::load(dir / "missingcat.json"),
                         "reference table lacks category: DataRetention",
                         MissingReferenceCategory);

    doc["values"]["DataRetention"] = "many";
    helpers::spit(dir / "notnumber.json", doc.dump());
    CHECK_THROWS_AS(ReferenceTable::load(dir / "notnumber.json"), Error);

    doc["values"]["DataRetention"] = 130.0;
    helpers::spit(dir / "outofrange.json", doc.dump());
    CHECK_THROWS_AS(ReferenceTable::load(dir / "outofrange.json"), Error);

    doc["values"]["DataRetention"] = 10.0;
    doc["overall"] = "high";
    helpers::spit(dir / "badoverall.json", doc.dump());
    CHECK_THROWS_AS(ReferenceTable::load(dir / "badoverall.json"), Error);

    // source_name falls back to the file stem.
    doc.erase("overall");
    helpers::spit(dir / "anon.json", doc.dump());
    CHECK(ReferenceTable::load(dir / "anon.json").source_name == "anon");
}

TEST_CASE("comparison against the published positive-segment columns") {
    ReferenceTable ours_ref = ReferenceTable::load(helpers::fixture_dir() / "reference" /
                                                   "positive_segments_xr.json");
    MetricTable ours = metric_table_from_reference(ours_ref);
    ReferenceTable free_ref =
        ReferenceTable::load(helpers::data_dir() / "reference" / "positive_segments_free.json");
    ReferenceTable premium_ref = ReferenceTable::load(helpers::data_dir() / "reference" /
                                                      "positive_segments_premium.json");

    ComparisonTable t = compare(ours, free_ref, premium_ref);
    CHECK(t.free_source == "free websites");
    CHECK(t.premium_source == "premium websites");

    const ComparisonEntry& fpu = t.row(Category::FirstPartyUse);
    CHECK(fpu.ours == 9708);
    CHECK(fpu.free_ref == 8690);
    CHECK(fpu.delta_free == 1018);  // the +10.18 cell
    CHECK(fpu.premium_ref == 9573);
    CHECK(fpu.delta_premium == 135);

    CHECK(t.row(Category::UserChoice).delta_premium == -2135);   // the -21.35 cell
    CHECK(t.row(Category::DataSecurity).delta_premium == 0);     // the 0.00 cell
    CHECK(t.row(Category::PolicyChange).delta_free == 1190);
    CHECK(t.row(Category::UserAccess).delta_free == -1042);

    CHECK(t.average.ours == 6435);
    CHECK(t.average.free_ref == 5829);
    CHECK(t.average.delta_free == 606);
    CHECK(t.average.premium_ref == 7008);
    CHECK(t.average.delta_premium == -573);

    // Neither positive-segment reference publishes a union row.
    CHECK_FALSE(t.overall.has_value());
}

TEST_CASE("comparison against the published highlighted-word columns") {
    MetricTable ours = metric_table_from_reference(ReferenceTable::load(
        helpers::fixture_dir() / "reference" / "highlighted_words_xr.json"));
    ReferenceTable free_ref =
        ReferenceTable::load(helpers::data_dir() / "reference" / "highlighted_words_free.json");
    ReferenceTable premium_ref = ReferenceTable::load(helpers::data_dir() / "reference" /
                                                      "highlighted_words_premium.json");

    ComparisonTable t = compare(ours, free_ref, premium_ref);
    CHECK(t.row(Category::ThirdPartySharing).delta_free == 931);  // the +9.31 cell
    CHECK(t.row(Category::FirstPartyUse).delta_free == -440);
    CHECK(t.row(Category::DoNotTrack).delta_free == -3);

    REQUIRE(t.overall.has_value());
    CHECK(t.overall->ours == 7558);
    CHECK(t.overall->delta_free == 621);
    CHECK(t.overall->delta_premium == 457);

    ReferenceTable wrong_kind =
        ReferenceTable::load(helpers::data_dir() / "reference" / "positive_segments_free.json");
    CHECK_THROWS_AS(compare(ours, wrong_kind, premium_ref), Error);
}

TEST_CASE("metric_table_from_reference recomputes the average") {
    ReferenceTable ref = ReferenceTable::load(helpers::fixture_dir() / "reference" /
                                              "highlighted_segments_xr.json");
    MetricTable t = metric_table_from_reference(ref);
    CHECK(t.kind == MetricKind::HighlightedSegments);
    CHECK(t.values == ref.values);
    CHECK(t.average == Approx(ref.average()).epsilon(1e-12));
    CHECK(t.overall == 62.29);

    ReferenceTable no_overall = ReferenceTable::load(helpers::data_dir() / "reference" /
                                                     "positive_segments_free.json");
    CHECK(metric_table_from_reference(no_overall).overall == 0.0);
}

TEST_CASE("report format names") {
    using report::Format;
    CHECK(report::format_name(Format::Csv) == "csv");
    CHECK(report::format_name(Format::Json) == "json");
    CHECK(report::format_name(Format::Md) == "md");
    CHECK(report::format_from_name("csv") == Format::Csv);
    CHECK(report::format_from_name("md") == Format::Md);
    CHECK(report::format_from_name("markdown") == Format::Md);
    CHECK_FALSE(report::format_from_name("pdf").has_value());
}

TEST_CASE("availability renderer reproduces the published availability table") {
    // Image 1, no link 16, not English 47, not available 42, text 22, HTML 280.
    ingest::AvailabilitySummary summary;
    summary.counts[ingest::AvailabilityClass::ImageOnly] = 1;
    summary.counts[ingest::AvailabilityClass::NoLinkOrDocument] = 16;
    summary.counts[ingest::AvailabilityClass::NotEnglish] = 47;
    summary.counts[ingest::AvailabilityClass::AppNotAvailable] = 42;
    summary.counts[ingest::AvailabilityClass::Text] = 22;
    summary.counts[ingest::AvailabilityClass::Html] = 280;

    const std::string csv =
        "availability,included,count\n"
        "Image,no,1\n"
        "No link or document,no,16\n"
        "Not in English,no,47\n"
        "Apps not available,no,42\n"
        "Text,yes,22\n"
        "HTML,yes,280\n"
        "Total,,408\n"
        "Included,,302\n";
    CHECK(report::render_availability(summary, report::Format::Csv) == csv);

    auto doc = nlohmann::json::parse(report::render_availability(summary, report::Format::Json));
    CHECK(doc.at("total") == 408);
    CHECK(doc.at("included") == 302);
    REQUIRE(doc.at("rows").size() == 6);
    CHECK(doc["rows"][0]["availability"] == "Image");
    CHECK(doc["rows"][0]["included"] == false);
    CHECK(doc["rows"][5]["availability"] == "HTML");
    CHECK(doc["rows"][5]["count"] == 280);

    std::string md = report::render_availability(summary, report::Format::Md);
    CHECK(md.find("| HTML | yes | 280 |") != std::string::npos);
    CHECK(md.find("| **Total** |  | 408 |") != std::string::npos);
    CHECK(md.find("| **Included** |  | 302 |") != std::string::npos);
}

TEST_CASE("corpus stats renderer formats the published totals") {
    CorpusStats s = corpus_stats_from_totals(240, 25135, 930225);

    const std::string csv =
        "statistic,value\n"
        "Policies,240\n"
        "Paragraphs,25135\n"
        "Avg. Paragraphs,104.73\n"
        "Words,930225\n"
        "Avg. Words,3875.94\n";
    CHECK(report::render_corpus_stats(s, report::Format::Csv) == csv);

    std::string md = report::render_corpus_stats(s, report::Format::Md);
    CHECK(md.find("| Paragraphs | 25,135 |") != std::string::npos);
    CHECK(md.find("| Words | 930,225 |") != std::string::npos);
    CHECK(md.find("| Avg. Words | 3,875.94 |") != std::string::npos);

    auto doc = nlohmann::json::parse(report::render_corpus_stats(s, report::Format::Json));
    CHECK(doc.at("policies") == 240);
    CHECK(doc.at("avg_paragraphs") == "104.73");
    CHECK(doc.at("avg_words") == "3875.94");
}

TEST_CASE("group stats renderer emits one row per group") {
    std::vector<GroupStats> groups = {
        group_stats_from_totals("Education", 48, 3172, 122376),
        group_stats_from_totals("Travel & Maps", 1, 25, 393),
    };
    std::string csv = report::render_group_stats(groups, report::Format::Csv);
    CHECK(csv.find("Education,48,3172,66.08,122376,2549.50\n") != std::string::npos);
    CHECK(csv.find("Travel & Maps,1,25,25.00,393,393.00\n") != std::string::npos);

    std::string md = report::render_group_stats(groups, report::Format::Md);
    CHECK(md.find("| Education | 48 | 3,172 | 66.08 | 122,376 | 2,549.50 |") !=
          std::string::npos);

    auto doc = nlohmann::json::parse(report::render_group_stats(groups, report::Format::Json));
    REQUIRE(doc.at("groups").size() == 2);
    CHECK(doc["groups"][0]["group"] == "Education");
    CHECK(doc["groups"][0]["mean_words"] == "2549.50");
}

TEST_CASE("filter report renderer") {
    prep::FilterReport r;
    r.input_documents = 302;
    r.excluded_no_privacy = 44;
    r.excluded_low_keyterms = 18;
    r.kept_documents = 240;
    r.dropped_short_paragraphs = 1234;

    const std::string csv =
        "counter,value\n"
        "input_documents,302\n"
        "excluded_no_privacy,44\n"
        "excluded_low_keyterms,18\n"
        "kept_documents,240\n"
        "dropped_short_paragraphs,1234\n";
    CHECK(report::render_filter_report(r, report::Format::Csv) == csv);

    auto doc = nlohmann::json::parse(report::render_filter_report(r, report::Format::Json));
    CHECK(doc.at("input_documents") == 302);
    CHECK(doc.at("kept_documents") == 240);

    std::string md = report::render_filter_report(r, report::Format::Md);
    CHECK(md.find("| Kept documents | 240 |") != std::string::npos);
}

TEST_CASE("metric table renderer is byte-stable") {
    MetricTable t = highlighted_segments(tiny_scored_corpus());

    const std::string csv =
        "category,percentage\n"
        "1st Party Use,50.00\n"
        "3rd Party Sharing,0.00\n"
        "User Choice,50.00\n"
        "User Access,0.00\n"
        "Data Retention,0.00\n"
        "Data Security,0.00\n"
        "Policy Change,0.00\n"
        "Do Not Track,0.00\n"
        "Specific Audiences,0.00\n"
        "Average,11.11\n"
        "Overall,75.00\n";
    CHECK(report::render_metric_table(t, report::Format::Csv) == csv);
    CHECK(report::render_metric_table(t, report::Format::Csv) ==
          report::render_metric_table(t, report::Format::Csv));

    auto doc = nlohmann::json::parse(report::render_metric_table(t, report::Format::Json));
    CHECK(doc.at("metric") == "highlighted_segments");
    CHECK(doc.at("values").at("FirstPartyUse") == "50.00");
    CHECK(doc.at("average") == "11.11");
    CHECK(doc.at("overall") == "75.00");

    std::string md = report::render_metric_table(t, report::Format::Md);
    CHECK(md.rfind("# Highlighted Segments\n", 0) == 0);
    CHECK(md.find("| 1st Party Use | 50.00 |") != std::string::npos);
    CHECK(md.find("| **Overall** | 75.00 |") != std::string::npos);
}

TEST_CASE("comparison renderer prints the published delta cells") {
    MetricTable ours = metric_table_from_reference(ReferenceTable::load(
        helpers::fixture_dir() / "reference" / "positive_segments_xr.json"));
    ComparisonTable t = compare(
        ours,
        ReferenceTable::load(helpers::data_dir() / "reference" / "positive_segments_free.json"),
        ReferenceTable::load(helpers::data_dir() / "reference" /
                             "positive_segments_premium.json"));

    std::string csv = report::render_comparison(t, report::Format::Csv);
    CHECK(csv.find("1st Party Use,97.08,86.90,+10.18,95.73,+1.35\n") != std::string::npos);
    CHECK(csv.find("User Choice,57.92,52.38,+5.54,79.27,-21.35\n") != std::string::npos);
    CHECK(csv.find("Data Security,75.00,67.86,+7.14,75.00,0.00\n") != std::string::npos);
    CHECK(csv.find("Average,64.35,58.29,+6.06,70.08,-5.73\n") != std::string::npos);
    CHECK(csv.find("Overall,") == std::string::npos);

    std::string md = report::render_comparison(t, report::Format::Md);
    CHECK(md.rfind("# Positive Segments vs. free websites / premium websites\n", 0) == 0);
    CHECK(md.find("| 1st Party Use | 97.08 | 86.90 | +10.18 | 95.73 | +1.35 |") !=
          std::string::npos);
    CHECK(md.find("| **Average** | 64.35 | 58.29 | +6.06 | 70.08 | -5.73 |") !=
          std::string::npos);

    auto doc = nlohmann::json::parse(report::render_comparison(t, report::Format::Json));
    CHECK(doc.at("rows").at("UserChoice").at("delta_premium") == "-21.35");
    CHECK(doc.at("rows").at("DataSecurity").at("delta_premium") == "0.00");
    CHECK_FALSE(doc.contains("overall"));

    // The highlighted-words variant carries the union row end to end.
    MetricTable words = metric_table_from_reference(ReferenceTable::load(
        helpers::fixture_dir() / "reference" / "highlighted_words_xr.json"));
    ComparisonTable wt = compare(
        words,
        ReferenceTable::load(helpers::data_dir() / "reference" / "highlighted_words_free.json"),
        ReferenceTable::load(helpers::data_dir() / "reference" /
                             "highlighted_words_premium.json"));
    std::string wcsv = report::render_comparison(wt, report::Format::Csv);
    CHECK(wcsv.find("3rd Party Sharing,28.46,19.15,+9.31,21.04,+7.42\n") != std::string::npos);
    CHECK(wcsv.find("Overall,75.58,69.37,+6.21,71.01,+4.57\n") != std::string::npos);
}

TEST_CASE("eval report renderer") {
    classify::EvalReport r;
    r.segment_count = 4;
    r.per_category[0] = classify::eval_from_counts(1, 1, 2, 0);
    for (std::size_t c = 1; c < kNumCategories; ++c)
        r.per_category[c] = classify::eval_from_counts(0, 0, 4, 0);
    r.overall = (0.75 + 8.0) / 9.0;

    std::string csv = report::render_eval_report(r, report::Format::Csv);
    CHECK(csv.find("1st Party Use,1,1,2,0,0.7500,0.5000,1.0000,0.6667\n") != std::string::npos);
    CHECK(csv.find("Do Not Track,0,0,4,0,1.0000,1.0000,1.0000,1.0000\n") != std::string::npos);
    CHECK(csv.find("Overall,,,,,0.9722,,,\n") != std::string::npos);

    auto doc = nlohmann::json::parse(report::render_eval_report(r, report::Format::Json));
    CHECK(doc.at("segments") == 4);
    CHECK(doc.at("categories").at("FirstPartyUse").at("f1") == "0.6667");
    CHECK(doc.at("overall_accuracy") == "0.9722");

    std::string md = report::render_eval_report(r, report::Format::Md);
    CHECK(md.find("| 1st Party Use | 1 | 1 | 2 | 0 | 0.7500 | 0.5000 | 1.0000 | 0.6667 |") !=
          std::string::npos);
}
