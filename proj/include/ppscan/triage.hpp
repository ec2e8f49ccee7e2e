#ifndef PPSCAN_TRIAGE_HPP
#define PPSCAN_TRIAGE_HPP

#include <cstddef>

#include "ppscan/policy_record.hpp"
#include "ppscan/tokenize.hpp"

namespace ppscan::ingest {

// Stopword-coverage heuristic: a document with at least `min_tokens` alphabetic
// tokens counts as English when the fraction of tokens found in the English
// stopword list is at least `min_stopword_fraction`. Shorter documents pass by
// default (too little evidence to exclude).
class EnglishDetector {
public:
    explicit EnglishDetector(const prep::StopwordSet& stopwords,
                             double min_stopword_fraction = 0.02, std::size_t min_tokens = 50)
        : stopwords_(stopwords),
          min_fraction_(min_stopword_fraction),
          min_tokens_(min_tokens) {}

    bool is_english(const std::string& text) const;

private:
    const prep::StopwordSet& stopwords_;
    double min_fraction_;
    std::size_t min_tokens_;
};

struct TriageOptions {
    std::size_t image_only_max_words = 25;  // prose below this + image markup => ImageOnly
};

// Assigns the final availability class for a fetched record. Every record
// classifies; the decision is deterministic for a fixed configuration.
AvailabilityClass triage(const PolicyRecord& record, const EnglishDetector& english,
                         const TriageOptions& options = {});

}  // namespace ppscan::ingest

#endif
