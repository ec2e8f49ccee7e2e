#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "helpers.hpp"
#include "ppscan/corpus_store.hpp"
#include "ppscan/extract.hpp"
#include "ppscan/pipeline.hpp"
#include "ppscan/prep.hpp"
#include "ppscan/run_config.hpp"
#include "ppscan/tokenize.hpp"

using namespace ppscan;
using namespace ppscan::prep;

namespace {

extract::Document make_doc(const std::vector<std::string>& paragraph_texts,
                           const std::string& app_id = "app.test") {
    extract::Document doc;
    doc.app_id = app_id;
    doc.group = "Games";
    for (const auto& text : paragraph_texts) {
        extract::Paragraph p;
        p.index = doc.paragraphs.size();
        p.text = text;
        p.word_count = extract::count_words(text);
        doc.paragraphs.push_back(std::move(p));
    }
    return doc;
}

// Passes relevance comfortably: privacy x1, and every key term twice.
const std::string kRelevantText =
    "This privacy policy explains the policy for all information we hold: "
    "personal information, personal data, and usage data.";

const StopwordSet& stopwords() {
    static StopwordSet set = StopwordSet::load(helpers::data_dir() / "stopwords_en.txt");
    return set;
}

}  // namespace

TEST_CASE("split_alpha_tokens lowercases and splits on non-letters") {
    CHECK(split_alpha_tokens("We collect, DATA-123 now!") ==
          std::vector<std::string>{"we", "collect", "data", "now"});
    CHECK(split_alpha_tokens("don't") == std::vector<std::string>{"don", "t"});
    CHECK(split_alpha_tokens("caf\xC3\xA9") == std::vector<std::string>{"caf"});
    CHECK(split_alpha_tokens("12345 67") == std::vector<std::string>{});
    CHECK(split_alpha_tokens("") == std::vector<std::string>{});
    CHECK(split_alpha_tokens("  spaced\tout\n") == std::vector<std::string>{"spaced", "out"});
}

TEST_CASE("stopword list loads and deliberately omits the key terms") {
    const StopwordSet& sw = stopwords();
    CHECK(sw.size() > 100);
    for (const char* w : {"the", "and", "we", "you", "of", "to"}) CHECK(sw.contains(w));
    // Key analysis terms must never be treated as stopwords.
    for (const char* w : {"privacy", "information", "personal", "data", "policy", "service"})
        CHECK_FALSE(sw.contains(w));
    CHECK_FALSE(sw.contains("encryption"));

    StopwordSet small({"alpha", "beta"});
    CHECK(small.size() == 2);
    CHECK(small.contains("alpha"));
    CHECK_FALSE(small.contains("gamma"));
    CHECK(StopwordSet().empty());
}

TEST_CASE("tokenize removes stopwords after splitting") {
    auto tokens = tokenize("We collect the usage data and share it.", stopwords());
    CHECK(tokens == std::vector<std::string>{"collect", "usage", "data", "share"});
    CHECK(tokenize("the of and to", stopwords()).empty());
    // Without a stopword list nothing is removed.
    CHECK(tokenize("the data", StopwordSet()) == std::vector<std::string>{"the", "data"});
}

TEST_CASE("paragraph_filter keeps five words and up") {
    extract::Paragraph p;
    p.word_count = 4;
    CHECK_FALSE(paragraph_filter(p));
    p.word_count = 5;
    CHECK(paragraph_filter(p));
    CHECK(kMinParagraphWords == 5);
}

TEST_CASE("document_relevance applies the two exclusion rules") {
    SUBCASE("no privacy token excludes regardless of key terms") {
        auto doc = make_doc({"policy policy information information personal personal data data"});
        auto r = document_relevance(doc);
        CHECK_FALSE(r.kept);
        REQUIRE(r.reason.has_value());
        CHECK(*r.reason == DocDropReason::NoPrivacyTerm);
    }
    SUBCASE("privacy must be a standalone token") {
        auto doc = make_doc({"privacybubble policy policy information information "
                             "personal personal data data"});
        auto r = document_relevance(doc);
        REQUIRE(r.reason.has_value());
        CHECK(*r.reason == DocDropReason::NoPrivacyTerm);
    }
    SUBCASE("each key term below two excludes") {
        // Drop one key term at a time from an otherwise relevant text.
        const std::vector<std::string> kept_terms = {"information", "personal", "data", "policy"};
        for (const auto& missing : kept_terms) {
            std::string text = "privacy";
            for (const auto& term : kept_terms) {
                if (term == missing) continue;
                text += " " + term + " " + term;
            }
            text += " " + missing;  // once is not enough
            auto r = document_relevance(make_doc({text}));
            CHECK_FALSE(r.kept);
            REQUIRE(r.reason.has_value());
            CHECK(*r.reason == DocDropReason::LowKeyTerms);
        }
    }
    SUBCASE("counting is case-insensitive and spans paragraphs") {
        auto doc = make_doc({"PRIVACY Policy and policy.", "Information; INFORMATION!",
                             "Personal personal", "Data plans need data"});
        CHECK(document_relevance(doc).kept);
    }
    SUBCASE("service is tracked nowhere as an exclusion") {
        auto doc = make_doc({kRelevantText});  // contains no "service" token twice
        CHECK(document_relevance(doc).kept);
    }
    SUBCASE("empty document lacks the privacy term") {
        auto r = document_relevance(make_doc({}));
        CHECK_FALSE(r.kept);
        CHECK(*r.reason == DocDropReason::NoPrivacyTerm);
    }
}

TEST_CASE("reason names") {
    CHECK(drop_reason_name(DropReason::TooShort) == "TooShort");
    CHECK(drop_reason_name(DropReason::DocumentExcluded) == "DocumentExcluded");
    CHECK(doc_drop_reason_name(DocDropReason::NoPrivacyTerm) == "NoPrivacyTerm");
    CHECK(doc_drop_reason_name(DocDropReason::LowKeyTerms) == "LowKeyTerms");
    CHECK(default_key_terms() ==
          std::vector<std::string>{"information", "personal", "data", "policy"});
}

TEST_CASE("annotate_corpus marks segments and tallies the filter report") {
    std::vector<extract::Document> docs;
    docs.push_back(make_doc({kRelevantText, "Too short here.", "Another kept paragraph right here.",
                             "tiny"},
                            "app.kept"));
    docs.push_back(make_doc({"No magic word, though information information personal personal "
                             "data data policy policy."},
                            "app.noprivacy"));
    docs.push_back(make_doc({"privacy data policy policy information information personal"},
                            "app.lowterms"));

    AnnotatedCorpus corpus = annotate_corpus(docs, stopwords());
    CHECK(corpus.report.input_documents == 3);
    CHECK(corpus.report.excluded_no_privacy == 1);
    CHECK(corpus.report.excluded_low_keyterms == 1);
    CHECK(corpus.report.kept_documents == 1);
    CHECK(corpus.report.dropped_short_paragraphs == 2);

    REQUIRE(corpus.documents.size() == 3);
    const PreparedDocument& kept = corpus.documents[0];
    CHECK(kept.kept);
    CHECK_FALSE(kept.doc_drop_reason.has_value());
    REQUIRE(kept.segments.size() == 4);
    CHECK(kept.segments[0].kept);
    CHECK_FALSE(kept.segments[1].kept);
    CHECK(*kept.segments[1].drop_reason == DropReason::TooShort);
    CHECK(kept.segments[2].kept);
    CHECK(*kept.segments[3].drop_reason == DropReason::TooShort);

    // Tokens are lowercase, stopword-free, and the paragraph rides along.
    const TokenizedSegment& seg = kept.segments[2];
    CHECK(seg.paragraph.text == "Another kept paragraph right here.");
    CHECK(seg.paragraph.index == 2);
    CHECK(seg.tokens == std::vector<std::string>{"another", "kept", "paragraph", "right"});

    const PreparedDocument& excluded = corpus.documents[1];
    CHECK_FALSE(excluded.kept);
    CHECK(*excluded.doc_drop_reason == DocDropReason::NoPrivacyTerm);
    for (const auto& s : excluded.segments) {
        CHECK_FALSE(s.kept);
        CHECK(*s.drop_reason == DropReason::DocumentExcluded);
    }
    CHECK(*corpus.documents[2].doc_drop_reason == DocDropReason::LowKeyTerms);

    // Short paragraphs in excluded documents count as DocumentExcluded, not TooShort.
    std::vector<extract::Document> only_excluded;
    only_excluded.push_back(make_doc({"tiny", "also tiny"}, "app.e"));
    AnnotatedCorpus c2 = annotate_corpus(only_excluded, stopwords());
    CHECK(c2.report.dropped_short_paragraphs == 0);
    CHECK(c2.documents[0].segments[0].drop_reason == DropReason::DocumentExcluded);
}

TEST_CASE("recount_filter_report agrees with annotate_corpus") {
    std::vector<extract::Document> docs;
    docs.push_back(make_doc({kRelevantText, "short one.", "Privacy matters to everyone here."},
                            "app.a"));
    docs.push_back(make_doc({"nothing relevant at all"}, "app.b"));
    docs.push_back(make_doc({kRelevantText}, "app.c"));

    AnnotatedCorpus corpus = annotate_corpus(docs, stopwords());
    FilterReport recounted = recount_filter_report(corpus.documents);
    CHECK(recounted.input_documents == corpus.report.input_documents);
    CHECK(recounted.excluded_no_privacy == corpus.report.excluded_no_privacy);
    CHECK(recounted.excluded_low_keyterms == corpus.report.excluded_low_keyterms);
    CHECK(recounted.kept_documents == corpus.report.kept_documents);
    CHECK(recounted.dropped_short_paragraphs == corpus.report.dropped_short_paragraphs);
}

TEST_CASE("prepared documents round-trip through the corpus store") {
    auto dir = helpers::temp_dir("prep_store");
    ingest::CorpusStore store(dir);

    auto doc = make_doc({kRelevantText, "tiny"}, "app.round");
    doc.paragraphs[0].emphasis = true;
    AnnotatedCorpus corpus = annotate_corpus({doc}, stopwords());
    // prep.json stores tokens only; paragraph text rehydrates from the
    // extract stage output, so that must be on disk first.
    store.save_document(doc);
    store.save_prepared(corpus.documents[0]);
    REQUIRE(store.has_prepared("app.round"));

    PreparedDocument back = store.load_prepared("app.round");
    CHECK(back.app_id == "app.round");
    CHECK(back.group == "Games");
    CHECK(back.kept == corpus.documents[0].kept);
    REQUIRE(back.segments.size() == 2);
    CHECK(back.segments[0].kept);
    CHECK(back.segments[0].tokens == corpus.documents[0].segments[0].tokens);
    CHECK(back.segments[0].paragraph.text == kRelevantText);
    CHECK(back.segments[0].paragraph.emphasis);
    CHECK(back.segments[0].paragraph.word_count ==
          corpus.documents[0].segments[0].paragraph.word_count);
    REQUIRE(back.segments[1].drop_reason.has_value());
    CHECK(*back.segments[1].drop_reason == DropReason::TooShort);
}

TEST_CASE("run_prep over the stub corpus reproduces the hand-derived counts") {
    auto server = helpers::serve_directory(helpers::fixture_dir() / "stub_corpus");
    auto dir = helpers::temp_dir("prep_pipeline");
    auto manifest = helpers::instantiate_manifest(
        helpers::fixture_dir() / "stub_corpus" / "manifest.csv.in", server.base_url(),
        dir / "manifest.csv");

    RunConfig config;
    config.corpus_dir = dir / "corpus";
    config.manifest = manifest;
    config.stopwords = helpers::data_dir() / "stopwords_en.txt";
    config.fetch.politeness_delay_ms = 0;
    config.fetch.timeout_seconds = 5;

    pipeline::run_ingest(config);
    CHECK(pipeline::run_extract(config) == 8);

    FilterReport report = pipeline::run_prep(config);
    CHECK(report.input_documents == 8);
    CHECK(report.excluded_no_privacy == 1);
    CHECK(report.excluded_low_keyterms == 0);
    CHECK(report.kept_documents == 7);
    CHECK(report.dropped_short_paragraphs == 10);

    ingest::CorpusStore store(config.corpus_dir);
    const std::vector<std::pair<std::string, std::size_t>> kept_per_doc = {
        {"app.alpha.reader", 9}, {"app.beta.math", 8},  {"app.gamma.blocks", 6},
        {"app.delta.racer", 6},  {"app.epsilon.scan", 6}, {"app.zeta.chat", 6},
        {"app.eta.notes", 7},
    };
    std::size_t kept_total = 0;
    for (const auto& [app_id, expected] : kept_per_doc) {
        PreparedDocument doc = store.load_prepared(app_id);
        CHECK(doc.kept);
        std::size_t kept = 0;
        for (const auto& s : doc.segments) kept += s.kept ? 1 : 0;
        CHECK_MESSAGE(kept == expected, app_id, " kept ", kept, " expected ", expected);
        kept_total += kept;
    }
    CHECK(kept_total == 48);

    PreparedDocument excluded = store.load_prepared("app.theta.metrics");
    CHECK_FALSE(excluded.kept);
    REQUIRE(excluded.doc_drop_reason.has_value());
    CHECK(*excluded.doc_drop_reason == DocDropReason::NoPrivacyTerm);
}
