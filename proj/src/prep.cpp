#include "ppscan/prep.hpp"

#include <unordered_map>

namespace ppscan::prep {

namespace {

const std::string kPrivacyTerm = "privacy";

}  // namespace

const std::string& drop_reason_name(DropReason r) {
    static const std::string too_short = "TooShort";
    static const std::string doc_excluded = "DocumentExcluded";
    return r == DropReason::TooShort ? too_short : doc_excluded;
}

const std::string& doc_drop_reason_name(DocDropReason r) {
    static const std::string no_privacy = "NoPrivacyTerm";
    static const std::string low_keyterms = "LowKeyTerms";
    return r == DocDropReason::NoPrivacyTerm ? no_privacy : low_keyterms;
}

const std::vector<std::string>& default_key_terms() {
    static const std::vector<std::string> terms = {"information", "personal", "data", "policy"};
    return terms;
}

RelevanceResult document_relevance(const extract::Document& doc,
                                   const std::vector<std::string>& key_terms) {
    std::unordered_map<std::string, std::size_t> counts;
    for (const auto& p : doc.paragraphs) {
        for (const auto& token : split_alpha_tokens(p.text)) {
            auto it = counts.find(token);
            if (it != counts.end()) ++it->second;
            else counts.emplace(token, 1);
        }
    }

    auto count_of = [&](const std::string& term) -> std::size_t {
        auto it = counts.find(term);
        return it == counts.end() ? 0 : it->second;
    };

    if (count_of(kPrivacyTerm) == 0) return {false, DocDropReason::NoPrivacyTerm};
    for (const auto& term : key_terms) {
        if (count_of(term) < 2) return {false, DocDropReason::LowKeyTerms};
    }
    return {true, std::nullopt};
}

bool paragraph_filter(const extract::Paragraph& p) {
    return p.word_count >= kMinParagraphWords;
}

AnnotatedCorpus annotate_corpus(const std::vector<extract::Document>& docs,
                                const StopwordSet& stopwords,
                                const std::vector<std::string>& key_terms) {
    AnnotatedCorpus out;
    out.report.input_documents = docs.size();

    for (const auto& doc : docs) {
        PreparedDocument prepared;
        prepared.app_id = doc.app_id;
        prepared.group = doc.group;

        RelevanceResult relevance = document_relevance(doc, key_terms);
        prepared.kept = relevance.kept;
        prepared.doc_drop_reason = relevance.reason;
        if (!relevance.kept) {
            if (*relevance.reason == DocDropReason::NoPrivacyTerm)
                ++out.report.excluded_no_privacy;
            else
                ++out.report.excluded_low_keyterms;
        }

        prepared.segments.reserve(doc.paragraphs.size());
        for (const auto& p : doc.paragraphs) {
            TokenizedSegment seg;
            seg.paragraph = p;
            seg.tokens = tokenize(p.text, stopwords);
            if (!relevance.kept) {
                seg.kept = false;
                seg.drop_reason = DropReason::DocumentExcluded;
            } else if (!paragraph_filter(p)) {
                seg.kept = false;
                seg.drop_reason = DropReason::TooShort;
                ++out.report.dropped_short_paragraphs;
            } else {
                seg.kept = true;
            }
            prepared.segments.push_back(std::move(seg));
        }
        out.documents.push_back(std::move(prepared));
    }

    out.report.kept_documents = out.report.input_documents - out.report.excluded_no_privacy -
                                out.report.excluded_low_keyterms;
    return out;
}

FilterReport recount_filter_report(const std::vector<PreparedDocument>& docs) {
    FilterReport report;
    report.input_documents = docs.size();
    for (const auto& doc : docs) {
        if (doc.kept) {
            ++report.kept_documents;
            for (const auto& seg : doc.segments)
                if (!seg.kept && seg.drop_reason == DropReason::TooShort)
                    ++report.dropped_short_paragraphs;
        } else if (doc.doc_drop_reason == DocDropReason::NoPrivacyTerm) {
            ++report.excluded_no_privacy;
        } else {
            ++report.excluded_low_keyterms;
        }
    }
    return report;
}

}  // namespace ppscan::prep
