#ifndef PPSCAN_POLICY_RECORD_HPP
#define PPSCAN_POLICY_RECORD_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ppscan/manifest.hpp"

namespace ppscan::ingest {

// Availability triage classes. Exactly one applies per record; only Html and
// Text records enter the analysis corpus.
enum class AvailabilityClass {
    Html,
    Text,
    ImageOnly,
    NoLinkOrDocument,
    NotEnglish,
    AppNotAvailable,
};

inline constexpr std::size_t kNumAvailabilityClasses = 6;

bool is_included(AvailabilityClass c);

// Machine name ("html", "no_link_or_document", ...), used in meta.json.
const std::string& availability_name(AvailabilityClass c);

// Row label for the availability summary table ("HTML", "No link or document", ...).
const std::string& availability_display_name(AvailabilityClass c);

std::optional<AvailabilityClass> availability_from_name(const std::string& name);

// One fetched policy. Fetch failures are data, not exceptions: a failed fetch
// yields a record with availability NoLinkOrDocument and a populated error.
struct PolicyRecord {
    ManifestEntry entry;
    AvailabilityClass availability = AvailabilityClass::NoLinkOrDocument;
    std::string raw_content;            // response body bytes
    std::string content_type;           // media type, e.g. "text/html"
    std::string fetched_at;             // RFC 3339 timestamp
    std::optional<std::string> error;   // fetch-error description

    bool included() const { return is_included(availability); }
};

struct AvailabilitySummary {
    // Counts partition the record list: sum over classes == record count.
    std::map<AvailabilityClass, std::size_t> counts;

    std::size_t total() const;
    std::size_t included() const;
    std::size_t count(AvailabilityClass c) const;
};

AvailabilitySummary availability_summary(const std::vector<PolicyRecord>& records);

}  // namespace ppscan::ingest

#endif
