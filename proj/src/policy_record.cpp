#include "ppscan/policy_record.hpp"

#include <array>

namespace ppscan::ingest {

namespace {

const std::array<std::string, kNumAvailabilityClasses> kNames = {
    "html", "text", "image_only", "no_link_or_document", "not_english", "app_not_available",
};

const std::array<std::string, kNumAvailabilityClasses> kDisplayNames = {
    "HTML", "Text", "Image", "No link or document", "Not in English", "Apps not available",
};

std::size_t idx(AvailabilityClass c) { return static_cast<std::size_t>(c); }

}  // namespace

bool is_included(AvailabilityClass c) {
    return c == AvailabilityClass::Html || c == AvailabilityClass::Text;
}

const std::string& availability_name(AvailabilityClass c) { return kNames[idx(c)]; }

const std::string& availability_display_name(AvailabilityClass c) { return kDisplayNames[idx(c)]; }

std::optional<AvailabilityClass> availability_from_name(const std::string& name) {
    for (std::size_t i = 0; i < kNumAvailabilityClasses; ++i) {
        if (kNames[i] == name) return static_cast<AvailabilityClass>(i);
    }
    return std::nullopt;
}

std::size_t AvailabilitySummary::total() const {
    std::size_t n = 0;
    for (const auto& [cls, count] : counts) n += count;
    return n;
}

std::size_t AvailabilitySummary::included() const {
    return count(AvailabilityClass::Html) + count(AvailabilityClass::Text);
}

std::size_t AvailabilitySummary::count(AvailabilityClass c) const {
    auto it = counts.find(c);
    return it == counts.end() ? 0 : it->second;
}

AvailabilitySummary availability_summary(const std::vector<PolicyRecord>& records) {
    AvailabilitySummary summary;
    for (std::size_t i = 0; i < kNumAvailabilityClasses; ++i)
        summary.counts[static_cast<AvailabilityClass>(i)] = 0;
    for (const auto& r : records) summary.counts[r.availability] += 1;
    return summary;
}

}  // namespace ppscan::ingest
