#ifndef PPSCAN_PREP_HPP
#define PPSCAN_PREP_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ppscan/extract.hpp"
#include "ppscan/tokenize.hpp"

namespace ppscan::prep {

enum class DropReason { TooShort, DocumentExcluded };
enum class DocDropReason { NoPrivacyTerm, LowKeyTerms };

const std::string& drop_reason_name(DropReason r);
const std::string& doc_drop_reason_name(DocDropReason r);

// A paragraph after tokenization and filtering. Tokens are lowercase
// alphabetic with stopwords removed; kept == false always carries the reason.
struct TokenizedSegment {
    extract::Paragraph paragraph;
    std::vector<std::string> tokens;
    bool kept = false;
    std::optional<DropReason> drop_reason;
};

struct PreparedDocument {
    std::string app_id;
    std::string group;
    bool kept = false;
    std::optional<DocDropReason> doc_drop_reason;
    std::vector<TokenizedSegment> segments;
};

struct FilterReport {
    std::size_t input_documents = 0;
    std::size_t excluded_no_privacy = 0;
    std::size_t excluded_low_keyterms = 0;
    std::size_t kept_documents = 0;            // input - the two exclusions
    std::size_t dropped_short_paragraphs = 0;  // TooShort drops inside kept documents
};

// The four key terms whose counts gate document relevance. "privacy" itself is
// mandatory and checked separately; "service" is tracked in word counts but is
// not an exclusion criterion.
const std::vector<std::string>& default_key_terms();

struct RelevanceResult {
    bool kept = true;
    std::optional<DocDropReason> reason;
};

// Document-level relevance per the exclusion rules: no "privacy" token at all,
// or any key term appearing fewer than twice. Counting happens on the
// pre-stopword token stream, case-insensitively.
RelevanceResult document_relevance(const extract::Document& doc,
                                   const std::vector<std::string>& key_terms = default_key_terms());

// Paragraph-level filter: kept iff the paragraph has at least five words.
bool paragraph_filter(const extract::Paragraph& p);

inline constexpr std::size_t kMinParagraphWords = 5;

struct AnnotatedCorpus {
    std::vector<PreparedDocument> documents;
    FilterReport report;
};

// Applies document_relevance then paragraph_filter over the corpus and
// tokenizes every paragraph. Paragraphs of excluded documents are marked
// DocumentExcluded; short paragraphs in kept documents are marked TooShort.
AnnotatedCorpus annotate_corpus(const std::vector<extract::Document>& docs,
                                const StopwordSet& stopwords,
                                const std::vector<std::string>& key_terms = default_key_terms());

// Rebuilds the FilterReport from already-annotated documents (e.g. reloaded
// from the corpus store); agrees with the report annotate_corpus produced.
FilterReport recount_filter_report(const std::vector<PreparedDocument>& docs);

}  // namespace ppscan::prep

#endif
