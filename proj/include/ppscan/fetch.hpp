#ifndef PPSCAN_FETCH_HPP
#define PPSCAN_FETCH_HPP

#include <chrono>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "ppscan/policy_record.hpp"

namespace ppscan::ingest {

struct FetchOptions {
    int timeout_seconds = 30;
    int retries = 2;                       // attempts = retries + 1
    std::size_t parallelism = 8;           // max in-flight fetches
    int politeness_delay_ms = 1000;        // per-host gap between requests
    std::string user_agent = "ppscan/1.0 (+policy-corpus-collector)";
};

struct FetchResult {
    bool ok = false;           // transport-level success with 2xx status
    int status = 0;            // 0 when no response was received
    std::string body;
    std::string content_type;
    std::string error;         // empty on success
};

// Transport abstraction so the pipeline and tests can run without a network.
class HttpFetcher {
public:
    virtual ~HttpFetcher() = default;
    virtual FetchResult get(const std::string& url) = 0;
};

// Real fetcher with timeout, retry budget, and a per-host politeness delay.
// Retries transport errors and 5xx responses; 4xx responses are final.
class HttplibFetcher : public HttpFetcher {
public:
    explicit HttplibFetcher(FetchOptions options);
    FetchResult get(const std::string& url) override;

private:
    void wait_for_host_slot(const std::string& host_key);

    FetchOptions options_;
    std::mutex mutex_;
    std::map<std::string, std::chrono::steady_clock::time_point> next_allowed_;
};

// RFC 3339 UTC timestamp for PolicyRecord::fetched_at.
std::string rfc3339_now();

// Fetches one manifest entry. Never throws for per-document failures; the
// outcome (including timeouts and HTTP errors) lands in the record itself.
// The availability field holds a candidate class inferred from the media type;
// triage() later assigns the final class.
PolicyRecord fetch_policy(const ManifestEntry& entry, HttpFetcher& client);

// Fetches all entries with bounded parallelism. Output order matches input.
std::vector<PolicyRecord> fetch_all(const std::vector<ManifestEntry>& entries,
                                    HttpFetcher& client, std::size_t parallelism,
                                    const std::function<void(const PolicyRecord&)>& on_done = {});

}  // namespace ppscan::ingest

#endif
