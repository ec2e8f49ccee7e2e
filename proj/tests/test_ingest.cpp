#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "ppscan/corpus_store.hpp"
#include "ppscan/errors.hpp"
#include "ppscan/fetch.hpp"
#include "ppscan/manifest.hpp"
#include "ppscan/pipeline.hpp"
#include "ppscan/run_config.hpp"
#include "ppscan/tokenize.hpp"
#include "ppscan/triage.hpp"

using namespace ppscan;
using namespace ppscan::ingest;

namespace {

PolicyRecord make_record(std::string content, std::string content_type,
                         bool delisted = false) {
    PolicyRecord r;
    r.entry.app_id = "app.test";
    r.entry.group = "Games";
    r.entry.url = "http://policies.test/p";
    r.entry.delisted = delisted;
    r.raw_content = std::move(content);
    r.content_type = std::move(content_type);
    return r;
}

const prep::StopwordSet& stopwords() {
    static prep::StopwordSet set = prep::StopwordSet::load(helpers::data_dir() / "stopwords_en.txt");
    return set;
}

std::string repeat_words(const std::string& word, std::size_t n) {
    std::string out;
    for (std::size_t i = 0; i < n; ++i) {
        if (i) out += ' ';
        out += word;
    }
    return out;
}

}  // namespace

TEST_CASE("manifest: quoted fields, BOM, CRLF, delisted spellings") {
    std::string csv =
        "\xEF\xBB\xBF"
        "App_Id,GROUP,Url,Delisted\r\n"
        "com.a,Games,http://x.test/a,\r\n"
        "com.b,\"Games, VR\",http://x.test/b,true\r\n"
        "com.c,Tools,\"http://x.test/c?x=1&y=2\",YES\r\n"
        "\r\n"
        "com.d,Tools,http://x.test/d,0\r\n";
    auto entries = parse_manifest(csv);
    REQUIRE(entries.size() == 4);
    CHECK(entries[0].app_id == "com.a");
    CHECK(entries[0].group == "Games");
    CHECK(entries[0].url == "http://x.test/a");
    CHECK_FALSE(entries[0].delisted);
    CHECK(entries[1].group == "Games, VR");
    CHECK(entries[1].delisted);
    CHECK(entries[2].url == "http://x.test/c?x=1&y=2");
    CHECK(entries[2].delisted);
    CHECK_FALSE(entries[3].delisted);
}

TEST_CASE("manifest: delisted column is optional") {
    auto entries = parse_manifest("app_id,group,url\ncom.a,Games,https://x.test/a\n");
    REQUIRE(entries.size() == 1);
    CHECK_FALSE(entries[0].delisted);
}

TEST_CASE("manifest: header-only file yields zero entries") {
    CHECK(parse_manifest("app_id,group,url,delisted\n").empty());
}

TEST_CASE("manifest: structural errors") {
    CHECK_THROWS_WITH_AS(parse_manifest("app_id,group\ncom.a,Games\n"),
                         "manifest is missing required column: url", MissingColumn);
    CHECK_THROWS_AS(parse_manifest(""), MissingColumn);
    CHECK_THROWS_WITH_AS(
        parse_manifest("app_id,group,url\ncom.a,Games,http://x.test/a\ncom.a,Tools,http://x.test/b\n"),
        "duplicate app_id in manifest: com.a", DuplicateAppId);

    // Row problems report the 1-based file line.
    CHECK_THROWS_WITH_AS(parse_manifest("app_id,group,url\ncom.a,Games,http://x.test/a\ncom.b,Tools\n"),
                         "malformed manifest row at line 3: expected at least 3 fields",
                         MalformedRow);
    CHECK_THROWS_WITH_AS(parse_manifest("app_id,group,url\n,Games,http://x.test/a\n"),
                         "malformed manifest row at line 2: empty app_id", MalformedRow);
    CHECK_THROWS_WITH_AS(parse_manifest("app_id,group,url\ncom.a,Games,notaurl\n"),
                         "malformed manifest row at line 2: invalid absolute URL: notaurl",
                         MalformedRow);
    CHECK_THROWS_AS(parse_manifest("app_id,group,url\ncom.a,Games,ftp://x.test/a\n"), MalformedRow);
}

TEST_CASE("manifest: read_manifest surfaces missing files") {
    CHECK_THROWS_WITH_AS(read_manifest("/nonexistent/manifest.csv"),
                         "cannot open manifest: /nonexistent/manifest.csv", Error);
}

TEST_CASE("url validation") {
    CHECK(is_valid_absolute_url("http://example.com"));
    CHECK(is_valid_absolute_url("https://example.com:8443/privacy?lang=en#top"));
    CHECK(is_valid_absolute_url("HTTPS://EXAMPLE.COM/policy"));
    CHECK_FALSE(is_valid_absolute_url("example.com/privacy"));
    CHECK_FALSE(is_valid_absolute_url("ftp://example.com/privacy"));
    CHECK_FALSE(is_valid_absolute_url("http:///privacy"));
    CHECK_FALSE(is_valid_absolute_url("http://bad host/"));
    CHECK_FALSE(is_valid_absolute_url(""));
}

TEST_CASE("sanitize_app_id percent-encodes unsafe bytes without collisions") {
    CHECK(sanitize_app_id("com.example.app-2_beta") == "com.example.app-2_beta");
    CHECK(sanitize_app_id("com/ex:ample") == "com%2Fex%3Aample");
    CHECK(sanitize_app_id("a b") == "a%20b");
    // Already-encoded input must not collide with the raw form.
    CHECK(sanitize_app_id("a%2Fb") != sanitize_app_id("a/b"));
}

TEST_CASE("availability names and inclusion") {
    const std::vector<std::pair<AvailabilityClass, std::string>> names = {
        {AvailabilityClass::Html, "html"},
        {AvailabilityClass::Text, "text"},
        {AvailabilityClass::ImageOnly, "image_only"},
        {AvailabilityClass::NoLinkOrDocument, "no_link_or_document"},
        {AvailabilityClass::NotEnglish, "not_english"},
        {AvailabilityClass::AppNotAvailable, "app_not_available"},
    };
    for (const auto& [cls, name] : names) {
        CHECK(availability_name(cls) == name);
        REQUIRE(availability_from_name(name).has_value());
        CHECK(*availability_from_name(name) == cls);
    }
    CHECK_FALSE(availability_from_name("bogus").has_value());

    CHECK(availability_display_name(AvailabilityClass::ImageOnly) == "Image");
    CHECK(availability_display_name(AvailabilityClass::AppNotAvailable) == "Apps not available");

    CHECK(is_included(AvailabilityClass::Html));
    CHECK(is_included(AvailabilityClass::Text));
    CHECK_FALSE(is_included(AvailabilityClass::ImageOnly));
    CHECK_FALSE(is_included(AvailabilityClass::NoLinkOrDocument));
    CHECK_FALSE(is_included(AvailabilityClass::NotEnglish));
    CHECK_FALSE(is_included(AvailabilityClass::AppNotAvailable));
}

TEST_CASE("triage: rule order") {
    EnglishDetector english(stopwords());
    std::string good_html =
        "<html><body><p>We collect the information that you provide and we use it to run "
        "the service for you and for all of our users.</p></body></html>";

    SUBCASE("delisted wins over a perfectly good document") {
        auto r = make_record(good_html, "text/html", /*delisted=*/true);
        CHECK(triage(r, english) == AvailabilityClass::AppNotAvailable);
    }
    SUBCASE("fetch errors are NoLinkOrDocument") {
        auto r = make_record(good_html, "text/html");
        r.error = "HTTP 404";
        CHECK(triage(r, english) == AvailabilityClass::NoLinkOrDocument);
    }
    SUBCASE("empty body is NoLinkOrDocument") {
        auto r = make_record("", "text/html");
        CHECK(triage(r, english) == AvailabilityClass::NoLinkOrDocument);
    }
    SUBCASE("image media with little prose is ImageOnly") {
        auto r = make_record("scan of the policy", "image/png");
        CHECK(triage(r, english) == AvailabilityClass::ImageOnly);
    }
    SUBCASE("html img element with little prose is ImageOnly") {
        auto r = make_record("<html><body><img src='p.png'><p>See image above.</p></body></html>",
                             "text/html");
        CHECK(triage(r, english) == AvailabilityClass::ImageOnly);
    }
    SUBCASE("word-count boundary for ImageOnly is exclusive at 25") {
        auto words24 = "<p><img src='p.png'>" + repeat_words("we", 24) + "</p>";
        auto words25 = "<p><img src='p.png'>" + repeat_words("we", 25) + "</p>";
        CHECK(triage(make_record(words24, "text/html"), english) == AvailabilityClass::ImageOnly);
        CHECK(triage(make_record(words25, "text/html"), english) == AvailabilityClass::Html);
    }
    SUBCASE("markup without prose is NoLinkOrDocument") {
        auto r = make_record("<html><body><div><br></div></body></html>", "text/html");
        CHECK(triage(r, english) == AvailabilityClass::NoLinkOrDocument);
    }
    SUBCASE("whitespace-only plain text is NoLinkOrDocument") {
        auto r = make_record("   \n\n   \n", "text/plain");
        CHECK(triage(r, english) == AvailabilityClass::NoLinkOrDocument);
    }
    SUBCASE("binary payload falls back on the media type") {
        std::string junk;
        for (int i = 0; i < 256; ++i) junk += static_cast<char>(i % 7);
        CHECK(triage(make_record(junk, "image/png"), english) == AvailabilityClass::ImageOnly);
        CHECK(triage(make_record(junk, "application/octet-stream"), english) ==
              AvailabilityClass::NoLinkOrDocument);
    }
    SUBCASE("non-English documents are NotEnglish") {
        auto r = make_record(helpers::slurp(helpers::fixture_dir() / "stub_corpus" / "p09.html"),
                             "text/html");
        CHECK(triage(r, english) == AvailabilityClass::NotEnglish);
    }
    SUBCASE("English html and plain text reach the corpus classes") {
        CHECK(triage(make_record(good_html, "text/html"), english) == AvailabilityClass::Html);
        CHECK(triage(make_record("We collect the data that you give us.\n", "text/plain"),
                     english) == AvailabilityClass::Text);
        // Markup sniffing covers mislabeled html.
        CHECK(triage(make_record(good_html, "text/plain"), english) == AvailabilityClass::Html);
    }
}

TEST_CASE("english detector: short documents pass, coverage threshold binds at 2%") {
    EnglishDetector english(stopwords());
    CHECK(english.is_english(repeat_words("zork", 49)));          // too short to judge
    CHECK_FALSE(english.is_english(repeat_words("zork", 50)));    // zero stopword hits
    CHECK(english.is_english("the " + repeat_words("zork", 49)));  // 1/50 == 2%
    CHECK_FALSE(english.is_english("the " + repeat_words("zork", 51)));  // 1/52 < 2%
}

TEST_CASE("fetch_policy against a local server") {
    auto server = helpers::serve_directory(helpers::fixture_dir() / "stub_corpus");
    HttplibFetcher fetcher(FetchOptions{.timeout_seconds = 5, .retries = 1, .parallelism = 2,
                                        .politeness_delay_ms = 0, .user_agent = "ppscan-test"});

    SUBCASE("html document") {
        ManifestEntry e{"app.ok", "Games", server.url("/p01.html"), false};
        PolicyRecord r = fetch_policy(e, fetcher);
        CHECK(r.availability == AvailabilityClass::Html);
        CHECK(r.content_type == "text/html");
        CHECK(r.raw_content == helpers::slurp(helpers::fixture_dir() / "stub_corpus" / "p01.html"));
        CHECK_FALSE(r.error.has_value());
        // RFC 3339 UTC stamp, e.g. 2026-08-14T09:30:00Z
        REQUIRE(r.fetched_at.size() == 20);
        CHECK(r.fetched_at[4] == '-');
        CHECK(r.fetched_at[10] == 'T');
        CHECK(r.fetched_at.back() == 'Z');
    }
    SUBCASE("plain-text document") {
        ManifestEntry e{"app.txt", "Tools", server.url("/p07.txt"), false};
        PolicyRecord r = fetch_policy(e, fetcher);
        CHECK(r.availability == AvailabilityClass::Text);
        CHECK(r.content_type == "text/plain");
    }
    SUBCASE("missing document") {
        ManifestEntry e{"app.gone", "Games", server.url("/nope.html"), false};
        PolicyRecord r = fetch_policy(e, fetcher);
        CHECK(r.availability == AvailabilityClass::NoLinkOrDocument);
        REQUIRE(r.error.has_value());
        CHECK(*r.error == "HTTP 404");
        CHECK(r.raw_content.empty());
    }
    SUBCASE("invalid url") {
        ManifestEntry e{"app.bad", "Games", "notaurl", false};
        PolicyRecord r = fetch_policy(e, fetcher);
        CHECK(r.availability == AvailabilityClass::NoLinkOrDocument);
        REQUIRE(r.error.has_value());
        CHECK(*r.error == "invalid URL: notaurl");
    }
}

TEST_CASE("fetcher: retry budget and status handling") {
    std::atomic<int> flaky_hits{0};
    std::atomic<int> missing_hits{0};
    helpers::StubServer server([&](httplib::Server& s) {
        s.Get("/flaky", [&](const httplib::Request&, httplib::Response& res) {
            if (flaky_hits.fetch_add(1) < 2) {
                res.status = 500;
            } else {
                res.set_content("<p>we collect data</p>", "text/html");
            }
        });
        s.Get("/missing", [&](const httplib::Request&, httplib::Response& res) {
            missing_hits.fetch_add(1);
            res.status = 404;
        });
        s.Get("/empty", [&](const httplib::Request&, httplib::Response& res) {
            res.set_content("", "text/html");
        });
    });

    SUBCASE("5xx responses are retried until the budget runs out") {
        HttplibFetcher fetcher(FetchOptions{.timeout_seconds = 5, .retries = 2, .parallelism = 1,
                                            .politeness_delay_ms = 0, .user_agent = "t"});
        FetchResult r = fetcher.get(server.url("/flaky"));
        CHECK(r.ok);
        CHECK(r.status == 200);
        CHECK(flaky_hits.load() == 3);
    }
    SUBCASE("5xx without budget stays an error") {
        flaky_hits = 0;
        HttplibFetcher fetcher(FetchOptions{.timeout_seconds = 5, .retries = 0, .parallelism = 1,
                                            .politeness_delay_ms = 0, .user_agent = "t"});
        FetchResult r = fetcher.get(server.url("/flaky"));
        CHECK_FALSE(r.ok);
        CHECK(r.error == "HTTP 500");
        CHECK(flaky_hits.load() == 1);
    }
    SUBCASE("4xx responses are final, never retried") {
        HttplibFetcher fetcher(FetchOptions{.timeout_seconds = 5, .retries = 3, .parallelism = 1,
                                            .politeness_delay_ms = 0, .user_agent = "t"});
        FetchResult r = fetcher.get(server.url("/missing"));
        CHECK_FALSE(r.ok);
        CHECK(r.error == "HTTP 404");
        CHECK(missing_hits.load() == 1);
    }
    SUBCASE("2xx with an empty body records an error on the policy") {
        HttplibFetcher fetcher(FetchOptions{.timeout_seconds = 5, .retries = 0, .parallelism = 1,
                                            .politeness_delay_ms = 0, .user_agent = "t"});
        ManifestEntry e{"app.empty", "Games", server.url("/empty"), false};
        PolicyRecord r = fetch_policy(e, fetcher);
        CHECK(r.availability == AvailabilityClass::NoLinkOrDocument);
        REQUIRE(r.error.has_value());
        CHECK(*r.error == "empty response body");
    }
}

TEST_CASE("fetch timeouts land in the record as data") {
    struct TimeoutFetcher : HttpFetcher {
        FetchResult get(const std::string&) override {
            FetchResult r;
            r.error = "timeout after 30s";
            return r;
        }
    } fetcher;
    ManifestEntry e{"app.slow", "Games", "http://slow.test/p", false};
    PolicyRecord r = fetch_policy(e, fetcher);
    CHECK(r.availability == AvailabilityClass::NoLinkOrDocument);
    REQUIRE(r.error.has_value());
    CHECK(r.error->find("timeout") != std::string::npos);
}

TEST_CASE("fetch_all: output order matches input order") {
    auto server = helpers::serve_directory(helpers::fixture_dir() / "stub_corpus");
    HttplibFetcher fetcher(FetchOptions{.timeout_seconds = 5, .retries = 0, .parallelism = 4,
                                        .politeness_delay_ms = 0, .user_agent = "t"});
    std::vector<ManifestEntry> entries;
    const char* files[] = {"/p01.html", "/p02.html", "/p03.html",
                           "/missing.html", "/p07.txt", "/p05.html"};
    for (int i = 0; i < 6; ++i)
        entries.push_back({"app.n" + std::to_string(i), "Games", server.url(files[i]), false});

    std::atomic<int> done_calls{0};
    auto records = fetch_all(entries, fetcher, 4,
                             [&](const PolicyRecord&) { done_calls.fetch_add(1); });
    REQUIRE(records.size() == 6);
    for (int i = 0; i < 6; ++i) CHECK(records[i].entry.app_id == entries[i].app_id);
    CHECK(records[3].error.has_value());
    CHECK(done_calls.load() == 6);

    CHECK(fetch_all({}, fetcher, 4).empty());
}

TEST_CASE("corpus store: record round-trip including binary bodies") {
    auto dir = helpers::temp_dir("store");
    CorpusStore store(dir);

    PolicyRecord r = make_record(std::string("bytes\0with\xff nul", 15), "text/html", true);
    r.entry.app_id = "com/ex:ample";
    r.availability = AvailabilityClass::AppNotAvailable;
    r.fetched_at = "2026-08-14T00:00:00Z";
    r.error = "HTTP 451";
    store.save_record(r);

    PolicyRecord back = store.load_record("com/ex:ample");
    CHECK(back.entry.app_id == r.entry.app_id);
    CHECK(back.entry.group == r.entry.group);
    CHECK(back.entry.url == r.entry.url);
    CHECK(back.entry.delisted == r.entry.delisted);
    CHECK(back.availability == r.availability);
    CHECK(back.raw_content == r.raw_content);
    CHECK(back.fetched_at == r.fetched_at);
    REQUIRE(back.error.has_value());
    CHECK(*back.error == "HTTP 451");
    CHECK(std::filesystem::exists(dir / "com%2Fex%3Aample" / "meta.json"));

    PolicyRecord ok = make_record("<p>hello</p>", "text/html");
    ok.entry.app_id = "com.b";
    ok.availability = AvailabilityClass::Html;
    store.save_record(ok);
    CHECK_FALSE(store.load_record("com.b").error.has_value());

    auto apps = store.list_apps();
    REQUIRE(apps.size() == 2);
    CHECK(apps[0] == "com.b");
    CHECK(apps[1] == "com/ex:ample");

    CHECK_THROWS_AS(store.load_record("com.never"), Error);
    CHECK_FALSE(store.has_document("com.b"));
    CHECK_FALSE(store.has_prepared("com.b"));
}

TEST_CASE("atomic_write replaces content and leaves no temp files") {
    auto dir = helpers::temp_dir("atomic");
    auto path = dir / "out.txt";
    atomic_write(path, "first");
    atomic_write(path, "second");
    CHECK(read_file(path) == "second");
    std::size_t entries = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        (void)e;
        ++entries;
    }
    CHECK(entries == 1);
}

TEST_CASE("corpus lock is exclusive per corpus directory") {
    auto dir = helpers::temp_dir("lock");
    std::string expected = "corpus directory is locked by another run: " +
                           (dir / ".lock").string() + " (remove the file if that run is gone)";
    {
        CorpusLock lock(dir);
        CHECK_THROWS_WITH_AS(CorpusLock{dir}, expected.c_str(), Error);
    }
    CorpusLock again(dir);  // released on destruction
}

TEST_CASE("availability summary partitions the record list") {
    AvailabilitySummary empty = availability_summary({});
    CHECK(empty.total() == 0);
    CHECK(empty.included() == 0);
    CHECK(empty.counts.size() == kNumAvailabilityClasses);

    std::mt19937 rng(7);
    std::vector<PolicyRecord> records;
    for (int i = 0; i < 200; ++i) {
        PolicyRecord r;
        r.availability = static_cast<AvailabilityClass>(rng() % kNumAvailabilityClasses);
        records.push_back(r);
    }
    AvailabilitySummary s = availability_summary(records);
    CHECK(s.total() == records.size());
    std::size_t by_hand = 0;
    for (int i = 0; i < 6; ++i) by_hand += s.count(static_cast<AvailabilityClass>(i));
    CHECK(by_hand == records.size());
    CHECK(s.included() == s.count(AvailabilityClass::Html) + s.count(AvailabilityClass::Text));
}

TEST_CASE("run_ingest over the stub corpus fixture") {
    auto server = helpers::serve_directory(helpers::fixture_dir() / "stub_corpus");
    auto dir = helpers::temp_dir("ingest");
    auto manifest = helpers::instantiate_manifest(
        helpers::fixture_dir() / "stub_corpus" / "manifest.csv.in", server.base_url(),
        dir / "manifest.csv");

    RunConfig config;
    config.corpus_dir = dir / "corpus";
    config.manifest = manifest;
    config.stopwords = helpers::data_dir() / "stopwords_en.txt";
    config.fetch.politeness_delay_ms = 0;
    config.fetch.timeout_seconds = 5;
    config.fetch.parallelism = 4;

    pipeline::IngestOutcome out = pipeline::run_ingest(config);
    CHECK(out.records == 10);
    CHECK(out.summary.total() == 10);
    CHECK(out.summary.count(AvailabilityClass::Html) == 7);
    CHECK(out.summary.count(AvailabilityClass::Text) == 1);
    CHECK(out.summary.count(AvailabilityClass::NotEnglish) == 1);
    CHECK(out.summary.count(AvailabilityClass::NoLinkOrDocument) == 1);
    CHECK(out.summary.count(AvailabilityClass::ImageOnly) == 0);
    CHECK(out.summary.count(AvailabilityClass::AppNotAvailable) == 0);
    CHECK(out.summary.included() == 8);

    CorpusStore store(config.corpus_dir);
    CHECK(store.list_apps().size() == 10);
    CHECK(store.load_record("app.iota.lern").availability == AvailabilityClass::NotEnglish);
    PolicyRecord gone = store.load_record("app.kappa.gone");
    CHECK(gone.availability == AvailabilityClass::NoLinkOrDocument);
    REQUIRE(gone.error.has_value());
    CHECK(*gone.error == "HTTP 404");
    CHECK(store.load_record("app.eta.notes").availability == AvailabilityClass::Text);

    SUBCASE("re-running ingest over the same corpus is idempotent") {
        pipeline::IngestOutcome again = pipeline::run_ingest(config);
        CHECK(again.records == 10);
        CHECK(again.summary.count(AvailabilityClass::Html) == 7);
        CHECK(store.list_apps().size() == 10);
    }
}

TEST_CASE("run_ingest: header-only manifest yields a zero summary") {
    auto dir = helpers::temp_dir("ingest_empty");
    helpers::spit(dir / "manifest.csv", "app_id,group,url\n");

    RunConfig config;
    config.corpus_dir = dir / "corpus";
    config.manifest = dir / "manifest.csv";
    config.stopwords = helpers::data_dir() / "stopwords_en.txt";

    pipeline::IngestOutcome out = pipeline::run_ingest(config);
    CHECK(out.records == 0);
    CHECK(out.summary.total() == 0);
}

TEST_CASE("run_ingest: configuration errors throw") {
    RunConfig config;
    config.corpus_dir = helpers::temp_dir("ingest_bad") / "corpus";
    config.stopwords = helpers::data_dir() / "stopwords_en.txt";
    CHECK_THROWS_AS(pipeline::run_ingest(config), Error);  // no manifest configured

    config.manifest = "/nonexistent/manifest.csv";
    CHECK_THROWS_AS(pipeline::run_ingest(config), Error);

    config.manifest = helpers::fixture_dir() / "stub_corpus" / "manifest.csv.in";
    config.stopwords = "";
    CHECK_THROWS_AS(pipeline::run_ingest(config), Error);  // no stopword list
}
