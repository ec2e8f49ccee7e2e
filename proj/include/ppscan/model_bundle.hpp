#ifndef PPSCAN_MODEL_BUNDLE_HPP
#define PPSCAN_MODEL_BUNDLE_HPP

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ppscan/category.hpp"
#include "ppscan/label_scores.hpp"
#include "ppscan/lexicon.hpp"
#include "ppscan/linear_model.hpp"
#include "ppscan/onnx_model.hpp"
#include "ppscan/prep.hpp"

namespace ppscan::classify {

inline constexpr std::size_t kDefaultMaxTokens = 512;

enum class BackendKind { Lexicon, Linear, External };

const std::string& backend_kind_name(BackendKind k);
BackendKind backend_kind_from_name(const std::string& name);

// A classifier over the nine categories. One of three backends:
//   Lexicon  — keyword phrases matched against the normalized paragraph text
//   Linear   — per-category logistic regression over TF-IDF of the prep tokens
//   External — ONNX model fed token ids from its own vocabulary
// Thresholds are per category (default 0.5). Immutable after construction
// apart from the threshold/max_tokens knobs, so concurrent scoring is safe.
class ModelBundle {
public:
    ModelBundle() = default;

    static ModelBundle make_lexicon(Lexicon lexicon);
    static ModelBundle make_linear(TfidfVectorizer vectorizer,
                                   std::array<LinearHead, kNumCategories> heads);
    static ModelBundle make_external(ExternalModel model);

    bool loaded() const { return kind_.has_value(); }
    BackendKind kind() const;  // throws ModelNotLoaded on an empty bundle

    std::size_t max_tokens() const { return max_tokens_; }
    void set_max_tokens(std::size_t n) { max_tokens_ = n; }

    const ThresholdVector& thresholds() const { return thresholds_; }
    void set_thresholds(const ThresholdVector& t) { thresholds_ = t; }
    void set_threshold(Category c, double t) { thresholds_[category_index(c)] = t; }

    nlohmann::ordered_json& metadata() { return metadata_; }
    const nlohmann::ordered_json& metadata() const { return metadata_; }

    const Lexicon& lexicon() const;
    const TfidfVectorizer& vectorizer() const;
    const std::array<LinearHead, kNumCategories>& heads() const;
    const ExternalModel& external() const;

    // Versioned JSON serialization of a Linear bundle: vocabulary, idf,
    // per-category weights/bias/threshold, metadata.
    void save_linear(const std::filesystem::path& path) const;
    static ModelBundle load_linear(const std::filesystem::path& path);

    // Exports a Linear bundle as an ONNX graph over token ids plus the
    // vocabulary sidecar load_external_model expects. The graph reproduces
    // the TF-IDF pipeline exactly: a Gather table carrying idf-scaled
    // one-hot rows (out-of-vocabulary ids hit an all-zero row), ReduceMean
    // for count/length, then L2 normalization and the logistic heads.
    void export_onnx(const std::filesystem::path& model_path,
                     const std::filesystem::path& vocab_path) const;
    void export_onnx(const std::filesystem::path& model_path) const;

private:
    std::optional<BackendKind> kind_;
    std::size_t max_tokens_ = kDefaultMaxTokens;
    ThresholdVector thresholds_ = uniform_thresholds(0.5);
    nlohmann::ordered_json metadata_ = nlohmann::ordered_json::object();
    Lexicon lexicon_;
    TfidfVectorizer vectorizer_;
    std::array<LinearHead, kNumCategories> heads_{};
    std::optional<ExternalModel> external_;
};

// Path of the vocabulary sidecar for a model file: "<dir>/<stem>.vocab.json".
std::filesystem::path vocab_sidecar_path(const std::filesystem::path& model_path);

// Loads an ONNX classifier plus its vocabulary sidecar. The model must
// declare a single integer token-id input and a single float output of nine
// scores; tensor names are recorded in the bundle metadata.
ModelBundle load_external_model(const std::filesystem::path& model_path,
                                const std::filesystem::path& vocab_path);
ModelBundle load_external_model(const std::filesystem::path& model_path);

// Scores one kept segment. Tokens beyond max_tokens are ignored; the lexicon
// backend applies the same cap to its normalized word stream so no backend's
// scores depend on anything past position max_tokens.
LabelScores classify_segment(const prep::TokenizedSegment& seg, const ModelBundle& model);

}  // namespace ppscan::classify

#endif
