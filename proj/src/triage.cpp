#include "ppscan/triage.hpp"

#include "ppscan/errors.hpp"
#include "ppscan/extract.hpp"

namespace ppscan::ingest {

bool EnglishDetector::is_english(const std::string& text) const {
    std::vector<std::string> tokens = prep::split_alpha_tokens(text);
    if (tokens.size() < min_tokens_) return true;
    std::size_t hits = 0;
    for (const auto& t : tokens) {
        if (stopwords_.contains(t)) ++hits;
    }
    return static_cast<double>(hits) >= min_fraction_ * static_cast<double>(tokens.size());
}

AvailabilityClass triage(const PolicyRecord& record, const EnglishDetector& english,
                         const TriageOptions& options) {
    // Rules apply in a fixed order; the first match wins.
    if (record.entry.delisted) return AvailabilityClass::AppNotAvailable;
    if (record.error.has_value() || record.raw_content.empty())
        return AvailabilityClass::NoLinkOrDocument;

    bool image_media = record.content_type.rfind("image/", 0) == 0;

    std::string text;
    bool html = false;
    try {
        auto [decoded, encoding] = extract::decode_bytes(record.raw_content);
        html = record.content_type == "text/html" ||
               record.content_type == "application/xhtml+xml" ||
               extract::looks_like_html(decoded);
        std::vector<extract::Paragraph> paragraphs =
            html ? extract::extract_html(decoded) : extract::extract_plain_text(decoded);
        std::size_t words = 0;
        for (const auto& p : paragraphs) words += p.word_count;

        bool has_images = image_media || (html && extract::contains_image_element(decoded));
        if (has_images && words < options.image_only_max_words)
            return AvailabilityClass::ImageOnly;
        if (words == 0) return AvailabilityClass::NoLinkOrDocument;

        for (const auto& p : paragraphs) {
            text += p.text;
            text += '\n';
        }
    } catch (const UnparseableContent&) {
        return image_media ? AvailabilityClass::ImageOnly : AvailabilityClass::NoLinkOrDocument;
    }

    if (!english.is_english(text)) return AvailabilityClass::NotEnglish;
    return html ? AvailabilityClass::Html : AvailabilityClass::Text;
}

}  // namespace ppscan::ingest
