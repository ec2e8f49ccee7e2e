#ifndef PPSCAN_ERRORS_HPP
#define PPSCAN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ppscan {

// Base type for all toolkit errors so callers can catch one family.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- manifest / ingest ---

struct MissingColumn : Error {
    explicit MissingColumn(const std::string& column)
        : Error("manifest is missing required column: " + column), column(column) {}
    std::string column;
};

struct DuplicateAppId : Error {
    explicit DuplicateAppId(const std::string& app_id)
        : Error("duplicate app_id in manifest: " + app_id), app_id(app_id) {}
    std::string app_id;
};

struct MalformedRow : Error {
    MalformedRow(std::size_t line, const std::string& why)
        : Error("malformed manifest row at line " + std::to_string(line) + ": " + why),
          line(line) {}
    std::size_t line;
};

// --- extract ---

struct UnparseableContent : Error {
    explicit UnparseableContent(const std::string& why)
        : Error("unparseable content: " + why) {}
};

// --- classify ---

struct ModelNotLoaded : Error {
    ModelNotLoaded() : Error("no classifier backend is loaded") {}
};

struct BackendFailure : Error {
    explicit BackendFailure(const std::string& detail)
        : Error("classifier backend failure: " + detail) {}
};

struct InsufficientData : Error {
    explicit InsufficientData(const std::string& category)
        : Error("insufficient training data for category: " + category), category(category) {}
    std::string category;
};

struct NonFiniteLoss : Error {
    NonFiniteLoss() : Error("training loss became non-finite") {}
};

struct MalformedAnnotation : Error {
    MalformedAnnotation(std::size_t line, const std::string& why)
        : Error("malformed annotated segment at line " + std::to_string(line) + ": " + why),
          line(line) {}
    std::size_t line;
};

struct EmptyTestSet : Error {
    EmptyTestSet() : Error("evaluation requires a non-empty test set") {}
};

struct KTooLarge : Error {
    KTooLarge(std::size_t k, std::size_t n)
        : Error("invalid fold count k=" + std::to_string(k) + " for " + std::to_string(n) +
                " items (need 2 <= k <= n)") {}
};

struct BadModelSignature : Error {
    explicit BadModelSignature(const std::string& why)
        : Error("bad external model signature: " + why) {}
};

// --- metrics ---

struct EmptyCorpus : Error {
    explicit EmptyCorpus(const std::string& what_for)
        : Error("empty corpus: cannot compute " + what_for) {}
};

struct MissingReferenceCategory : Error {
    explicit MissingReferenceCategory(const std::string& category)
        : Error("reference table lacks category: " + category), category(category) {}
    std::string category;
};

}  // namespace ppscan

#endif
