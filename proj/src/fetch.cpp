#include "ppscan/fetch.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <ctime>
#include <thread>

#include <httplib.h>

namespace ppscan::ingest {

namespace {

struct ParsedUrl {
    std::string scheme_host_port;  // "http://example.com:8080"
    std::string path;              // "/privacy?x=1"
    std::string host;              // politeness key
    bool valid = false;
};

ParsedUrl parse_url(const std::string& url) {
    ParsedUrl p;
    std::size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos) return p;
    std::size_t host_start = scheme_end + 3;
    std::size_t path_start = url.find_first_of("/?#", host_start);
    if (path_start == std::string::npos) {
        p.scheme_host_port = url;
        p.path = "/";
    } else {
        p.scheme_host_port = url.substr(0, path_start);
        p.path = url[path_start] == '/' ? url.substr(path_start) : "/" + url.substr(path_start);
    }
    p.host = p.scheme_host_port.substr(host_start);
    p.valid = !p.host.empty();
    return p;
}

// Strip parameters from a media type: "text/html; charset=utf-8" -> "text/html".
std::string media_type(const std::string& content_type) {
    std::string mt = content_type.substr(0, content_type.find(';'));
    while (!mt.empty() && std::isspace(static_cast<unsigned char>(mt.back()))) mt.pop_back();
    std::transform(mt.begin(), mt.end(), mt.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return mt;
}

AvailabilityClass candidate_class(const FetchResult& r) {
    if (!r.ok || r.body.empty()) return AvailabilityClass::NoLinkOrDocument;
    std::string mt = media_type(r.content_type);
    if (mt.rfind("image/", 0) == 0) return AvailabilityClass::ImageOnly;
    if (mt == "text/html" || mt == "application/xhtml+xml") return AvailabilityClass::Html;
    return AvailabilityClass::Text;
}

}  // namespace

std::string rfc3339_now() {
    std::time_t now = std::time(nullptr);
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", utc.tm_year + 1900,
                  utc.tm_mon + 1, utc.tm_mday, utc.tm_hour, utc.tm_min, utc.tm_sec);
    return buf;
}

HttplibFetcher::HttplibFetcher(FetchOptions options) : options_(std::move(options)) {}

void HttplibFetcher::wait_for_host_slot(const std::string& host_key) {
    if (options_.politeness_delay_ms <= 0) return;
    std::chrono::steady_clock::time_point wake;
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto now = std::chrono::steady_clock::now();
        auto& slot = next_allowed_[host_key];
        wake = std::max(slot, now);
        slot = wake + std::chrono::milliseconds(options_.politeness_delay_ms);
    }
    std::this_thread::sleep_until(wake);
}

FetchResult HttplibFetcher::get(const std::string& url) {
    FetchResult result;
    ParsedUrl parsed = parse_url(url);
    if (!parsed.valid) {
        result.error = "invalid URL: " + url;
        return result;
    }

    int attempts = options_.retries + 1;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        wait_for_host_slot(parsed.host);

        httplib::Client client(parsed.scheme_host_port);
        client.set_connection_timeout(options_.timeout_seconds, 0);
        client.set_read_timeout(options_.timeout_seconds, 0);
        client.set_write_timeout(options_.timeout_seconds, 0);
        client.set_follow_location(true);
        httplib::Headers headers = {{"User-Agent", options_.user_agent},
                                    {"Accept", "text/html,text/plain,*/*"}};

        auto started = std::chrono::steady_clock::now();
        auto res = client.Get(parsed.path, headers);
        auto elapsed =
            std::chrono::duration_cast<std::chrono::seconds>(std::chrono::steady_clock::now() - started);
        if (!res) {
            result.status = 0;
            bool timed_out =
                res.error() == httplib::Error::ConnectionTimeout ||
                (elapsed.count() >= options_.timeout_seconds &&
                 (res.error() == httplib::Error::Read || res.error() == httplib::Error::Write ||
                  res.error() == httplib::Error::Connection));
            result.error = timed_out
                               ? "timeout after " + std::to_string(options_.timeout_seconds) + "s"
                               : "transport error: " + httplib::to_string(res.error());
            continue;  // retry
        }
        result.status = res->status;
        if (res->status >= 200 && res->status < 300) {
            result.ok = true;
            result.body = res->body;
            result.content_type = media_type(res->get_header_value("Content-Type"));
            result.error.clear();
            return result;
        }
        result.error = "HTTP " + std::to_string(res->status);
        if (res->status < 500) return result;  // 4xx is final
    }
    return result;
}

PolicyRecord fetch_policy(const ManifestEntry& entry, HttpFetcher& client) {
    PolicyRecord record;
    record.entry = entry;
    record.fetched_at = rfc3339_now();

    FetchResult result = client.get(entry.url);
    record.content_type = result.content_type;
    if (result.ok && !result.body.empty()) {
        record.availability = candidate_class(result);
        record.raw_content = std::move(result.body);
    } else {
        record.availability = AvailabilityClass::NoLinkOrDocument;
        record.error = result.error.empty() ? "empty response body" : result.error;
    }
    return record;
}

std::vector<PolicyRecord> fetch_all(const std::vector<ManifestEntry>& entries,
                                    HttpFetcher& client, std::size_t parallelism,
                                    const std::function<void(const PolicyRecord&)>& on_done) {
    std::vector<PolicyRecord> records(entries.size());
    if (entries.empty()) return records;

    parallelism = std::max<std::size_t>(1, std::min(parallelism, entries.size()));
    std::atomic<std::size_t> next{0};
    std::mutex done_mutex;

    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= entries.size()) return;
            records[i] = fetch_policy(entries[i], client);
            if (on_done) {
                std::lock_guard<std::mutex> lock(done_mutex);
                on_done(records[i]);
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(parallelism);
    for (std::size_t t = 0; t < parallelism; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return records;
}

}  // namespace ppscan::ingest
