#ifndef PPSCAN_EXTRACT_HPP
#define PPSCAN_EXTRACT_HPP

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ppscan/policy_record.hpp"

namespace ppscan::extract {

// One clean text unit. Paragraphs are the classification segments downstream.
struct Paragraph {
    std::size_t index = 0;     // 0-based position in the document
    std::string text;          // entity-decoded, whitespace-collapsed
    std::size_t word_count = 0;  // whitespace-delimited tokens in text
    bool emphasis = false;     // originated in heading / bold / strong markup
};

struct Document {
    std::string app_id;
    std::string group;
    std::vector<Paragraph> paragraphs;

    std::string encoding = "utf-8";  // chosen decoding, "utf-8" or "latin-1"
};

// Number of whitespace-delimited tokens.
std::size_t count_words(const std::string& text);

// True when the bytes look like markup rather than prose (used to pick the
// extraction mode for records fetched without a useful media type).
bool looks_like_html(const std::string& content);

// True when the markup contains at least one image element (img / picture /
// svg / image input); feeds the image-only triage rule.
bool contains_image_element(const std::string& content);

// HTML markup -> paragraphs. Script/style/nav/footer and other non-prose
// containers are dropped, block boundaries split paragraphs, entities are
// decoded, whitespace collapses, and heading/bold/strong provenance sets the
// emphasis flag. Table cells flatten into separate paragraphs in row order.
std::vector<Paragraph> extract_html(const std::string& html);

// Plain text -> paragraphs: split on blank lines, join wrapped lines.
std::vector<Paragraph> extract_plain_text(const std::string& text);

// Full record -> Document. Chooses the HTML or plain-text path from the
// record's media type (falling back to content sniffing), after decoding the
// bytes as UTF-8 with a Latin-1 fallback. Throws UnparseableContent for
// binary payloads.
Document extract_text(const ingest::PolicyRecord& record);

// (paragraph_count, word_count)
std::pair<std::size_t, std::size_t> document_stats(const Document& doc);

// Decodes bytes to UTF-8 text. Returns the text and the encoding used.
// Throws UnparseableContent when the payload is binary.
std::pair<std::string, std::string> decode_bytes(const std::string& bytes);

}  // namespace ppscan::extract

#endif
