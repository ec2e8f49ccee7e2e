#include "ppscan/model_bundle.hpp"

#include <fstream>
#include <sstream>

#include "ppscan/errors.hpp"

namespace ppscan::classify {

namespace {

const std::array<std::string, 3> kBackendNames = {"lexicon", "linear", "external"};

}  // namespace

const std::string& backend_kind_name(BackendKind k) {
    return kBackendNames[static_cast<std::size_t>(k)];
}

BackendKind backend_kind_from_name(const std::string& name) {
    for (std::size_t i = 0; i < kBackendNames.size(); ++i)
        if (kBackendNames[i] == name) return static_cast<BackendKind>(i);
    throw BackendFailure("unknown backend kind: " + name);
}

ModelBundle ModelBundle::make_lexicon(Lexicon lexicon) {
    ModelBundle b;
    b.kind_ = BackendKind::Lexicon;
    b.lexicon_ = std::move(lexicon);
    b.metadata_["backend"] = "lexicon";
    b.metadata_["lexicon_version"] = b.lexicon_.version();
    return b;
}

ModelBundle ModelBundle::make_linear(TfidfVectorizer vectorizer,
                                     std::array<LinearHead, kNumCategories> heads) {
    for (std::size_t c = 0; c < kNumCategories; ++c)
        if (heads[c].weights.size() != vectorizer.dim())
            throw BackendFailure("weight vector for " + category_name(kAllCategories[c]) +
                                 " does not match the vocabulary size");
    ModelBundle b;
    b.kind_ = BackendKind::Linear;
    b.vectorizer_ = std::move(vectorizer);
    b.heads_ = std::move(heads);
    b.metadata_["backend"] = "linear";
    return b;
}

ModelBundle ModelBundle::make_external(ExternalModel model) {
    ModelBundle b;
    b.kind_ = BackendKind::External;
    b.metadata_["backend"] = "external";
    b.metadata_["model_path"] = model.model_path();
    b.metadata_["vocab_path"] = model.vocab_path();
    b.metadata_["input_tensor"] = model.input_name();
    b.metadata_["output_tensor"] = model.output_name();
    b.external_ = std::move(model);
    return b;
}

BackendKind ModelBundle::kind() const {
    if (!kind_) throw ModelNotLoaded();
    return *kind_;
}

const Lexicon& ModelBundle::lexicon() const {
    if (kind() != BackendKind::Lexicon) throw BackendFailure("bundle has no lexicon backend");
    return lexicon_;
}

const TfidfVectorizer& ModelBundle::vectorizer() const {
    if (kind() != BackendKind::Linear) throw BackendFailure("bundle has no linear backend");
    return vectorizer_;
}

const std::array<LinearHead, kNumCategories>& ModelBundle::heads() const {
    if (kind() != BackendKind::Linear) throw BackendFailure("bundle has no linear backend");
    return heads_;
}

const ExternalModel& ModelBundle::external() const {
    if (kind() != BackendKind::External || !external_)
        throw BackendFailure("bundle has no external backend");
    return *external_;
}

void ModelBundle::save_linear(const std::filesystem::path& path) const {
    if (kind() != BackendKind::Linear)
        throw BackendFailure("only linear bundles have a JSON serialization");

    nlohmann::ordered_json doc;
    doc["format"] = "ppscan-linear-bundle";
    doc["version"] = 1;
    doc["max_tokens"] = max_tokens_;
    doc["vocabulary"] = vectorizer_.vocabulary();
    doc["idf"] = vectorizer_.idf();
    nlohmann::ordered_json cats = nlohmann::ordered_json::object();
    for (std::size_t c = 0; c < kNumCategories; ++c) {
        nlohmann::ordered_json entry;
        entry["weights"] = heads_[c].weights;
        entry["bias"] = heads_[c].bias;
        entry["threshold"] = thresholds_[c];
        cats[category_name(kAllCategories[c])] = std::move(entry);
    }
    doc["categories"] = std::move(cats);
    doc["metadata"] = metadata_;

    std::ofstream out(path, std::ios::trunc);
    if (!out) throw BackendFailure("cannot write bundle file: " + path.string());
    out << doc.dump(2) << "\n";
    if (!out) throw BackendFailure("failed writing bundle file: " + path.string());
}

ModelBundle ModelBundle::load_linear(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw BackendFailure("cannot open bundle file: " + path.string());
    nlohmann::ordered_json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw BackendFailure("bundle file is not valid JSON: " + std::string(e.what()));
    }
    if (doc.value("format", "") != "ppscan-linear-bundle")
        throw BackendFailure("not a linear bundle file: " + path.string());
    if (doc.value("version", 0) != 1)
        throw BackendFailure("unsupported bundle version in " + path.string());

    std::vector<std::string> vocabulary = doc.at("vocabulary").get<std::vector<std::string>>();
    std::vector<double> idf = doc.at("idf").get<std::vector<double>>();
    if (idf.size() != vocabulary.size())
        throw BackendFailure("bundle idf array does not match the vocabulary size");

    std::array<LinearHead, kNumCategories> heads;
    ThresholdVector thresholds = uniform_thresholds(0.5);
    const auto& cats = doc.at("categories");
    for (std::size_t c = 0; c < kNumCategories; ++c) {
        const std::string& name = category_name(kAllCategories[c]);
        if (!cats.contains(name))
            throw BackendFailure("bundle lacks category: " + name);
        const auto& entry = cats.at(name);
        heads[c].weights = entry.at("weights").get<std::vector<double>>();
        heads[c].bias = entry.at("bias").get<double>();
        thresholds[c] = entry.value("threshold", 0.5);
        if (heads[c].weights.size() != vocabulary.size())
            throw BackendFailure("bundle weights for " + name +
                                 " do not match the vocabulary size");
    }

    ModelBundle b = make_linear(TfidfVectorizer(std::move(vocabulary), std::move(idf)),
                                std::move(heads));
    b.set_thresholds(thresholds);
    b.set_max_tokens(doc.value("max_tokens", kDefaultMaxTokens));
    if (doc.contains("metadata")) b.metadata() = doc.at("metadata");
    return b;
}

void ModelBundle::export_onnx(const std::filesystem::path& model_path,
                              const std::filesystem::path& vocab_path) const {
    if (kind() != BackendKind::Linear)
        throw BackendFailure("only linear bundles can be exported to ONNX");

    const auto& vocab = vectorizer_.vocabulary();
    const auto& idf = vectorizer_.idf();
    const auto v = static_cast<std::int64_t>(vocab.size());
    constexpr auto n_cat = static_cast<std::int64_t>(kNumCategories);

    onnx::Graph g;
    g.name = "ppscan_linear";

    // Row i of the table is idf[i] * e_i; the extra final row is all zeros so
    // out-of-vocabulary ids contribute nothing but still count toward length.
    std::vector<double> table(static_cast<std::size_t>((v + 1) * v), 0.0);
    for (std::int64_t r = 0; r < v; ++r)
        table[static_cast<std::size_t>(r * v + r)] = idf[static_cast<std::size_t>(r)];
    g.initializers.emplace_back("tfidf_table", onnx::Tensor::floats({v + 1, v}, std::move(table)));

    std::vector<double> weights(static_cast<std::size_t>(v * n_cat), 0.0);
    std::vector<double> bias(kNumCategories, 0.0);
    for (std::size_t c = 0; c < kNumCategories; ++c) {
        bias[c] = heads_[c].bias;
        for (std::int64_t r = 0; r < v; ++r)
            weights[static_cast<std::size_t>(r * n_cat) + c] =
                heads_[c].weights[static_cast<std::size_t>(r)];
    }
    g.initializers.emplace_back("weights", onnx::Tensor::floats({v, n_cat}, std::move(weights)));
    g.initializers.emplace_back("bias", onnx::Tensor::floats({n_cat}, std::move(bias)));
    // Keeps the norm positive for all-zero vectors; vanishes in float32
    // arithmetic next to any real squared norm.
    g.initializers.emplace_back("eps", onnx::Tensor::floats({1}, {1e-20}));

    auto node = [](std::string op, std::vector<std::string> in, std::string out) {
        onnx::Node n;
        n.op_type = std::move(op);
        n.inputs = std::move(in);
        n.outputs = {std::move(out)};
        n.name = n.outputs[0];
        return n;
    };
    auto ints_attr = [](std::string name, std::vector<std::int64_t> vals) {
        onnx::Attribute a;
        a.name = std::move(name);
        a.kind = onnx::Attribute::Kind::Ints;
        a.ints = std::move(vals);
        return a;
    };
    auto int_attr = [](std::string name, std::int64_t val) {
        onnx::Attribute a;
        a.name = std::move(name);
        a.kind = onnx::Attribute::Kind::Int;
        a.i = val;
        return a;
    };

    onnx::Node embed = node("Gather", {"tfidf_table", "token_ids"}, "embedded");
    onnx::Node mean = node("ReduceMean", {"embedded"}, "tfidf");
    mean.attributes = {ints_attr("axes", {0}), int_attr("keepdims", 1)};
    onnx::Node norm_sq = node("ReduceSumSquare", {"tfidf"}, "norm_sq");
    norm_sq.attributes = {ints_attr("axes", {1}), int_attr("keepdims", 1)};
    onnx::Node add_eps = node("Add", {"norm_sq", "eps"}, "norm_sq_eps");
    onnx::Node norm = node("Sqrt", {"norm_sq_eps"}, "norm");
    onnx::Node unit = node("Div", {"tfidf", "norm"}, "unit_tfidf");
    onnx::Node logits = node("Gemm", {"unit_tfidf", "weights", "bias"}, "logits");
    onnx::Node scores = node("Sigmoid", {"logits"}, "scores");
    g.nodes = {std::move(embed), std::move(mean),   std::move(norm_sq),
               std::move(add_eps), std::move(norm), std::move(unit),
               std::move(logits),  std::move(scores)};

    onnx::ValueInfo input;
    input.name = "token_ids";
    input.elem_type = 7;  // int64
    input.dims = {-1};
    g.inputs = {input};
    onnx::ValueInfo output;
    output.name = "scores";
    output.elem_type = 1;  // float
    output.dims = {1, n_cat};
    g.outputs = {output};

    onnx::Model model;
    model.graph = std::move(g);
    model.opset_version = 13;
    model.save(model_path.string());

    nlohmann::ordered_json vocab_doc;
    vocab_doc["version"] = 1;
    vocab_doc["unk_id"] = v;
    nlohmann::ordered_json tokens = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < vocab.size(); ++i) tokens[vocab[i]] = i;
    vocab_doc["tokens"] = std::move(tokens);
    std::ofstream out(vocab_path, std::ios::trunc);
    if (!out) throw BackendFailure("cannot write vocabulary file: " + vocab_path.string());
    out << vocab_doc.dump(2) << "\n";
    if (!out) throw BackendFailure("failed writing vocabulary file: " + vocab_path.string());
}

void ModelBundle::export_onnx(const std::filesystem::path& model_path) const {
    export_onnx(model_path, vocab_sidecar_path(model_path));
}

std::filesystem::path vocab_sidecar_path(const std::filesystem::path& model_path) {
    std::filesystem::path p = model_path;
    p.replace_extension("");
    p += ".vocab.json";
    return p;
}

ModelBundle load_external_model(const std::filesystem::path& model_path,
                                const std::filesystem::path& vocab_path) {
    return ModelBundle::make_external(
        ExternalModel::load(model_path.string(), vocab_path.string()));
}

ModelBundle load_external_model(const std::filesystem::path& model_path) {
    return load_external_model(model_path, vocab_sidecar_path(model_path));
}

namespace {

// First max_words whitespace-separated words of an already normalized string.
std::string truncate_words(const std::string& normalized, std::size_t max_words) {
    std::size_t words = 0;
    std::size_t i = 0;
    while (i < normalized.size()) {
        std::size_t start = i;
        while (i < normalized.size() && normalized[i] != ' ') ++i;
        if (i > start && ++words == max_words) return normalized.substr(0, i);
        if (i < normalized.size()) ++i;
    }
    return normalized;
}

}  // namespace

LabelScores classify_segment(const prep::TokenizedSegment& seg, const ModelBundle& model) {
    if (!model.loaded()) throw ModelNotLoaded();
    if (!seg.kept)
        throw Error("classify_segment requires a kept segment (paragraph " +
                    std::to_string(seg.paragraph.index) + " was dropped by prep)");

    ScoreVector scores{};
    switch (model.kind()) {
        case BackendKind::Lexicon: {
            std::string normalized = Lexicon::normalize_for_match(seg.paragraph.text);
            normalized = truncate_words(normalized, model.max_tokens());
            for (std::size_t c = 0; c < kNumCategories; ++c)
                scores[c] = model.lexicon().matches(kAllCategories[c], normalized) ? 1.0 : 0.0;
            break;
        }
        case BackendKind::Linear: {
            std::vector<std::string> tokens = seg.tokens;
            if (tokens.size() > model.max_tokens()) tokens.resize(model.max_tokens());
            SparseVector x = model.vectorizer().transform(tokens);
            for (std::size_t c = 0; c < kNumCategories; ++c)
                scores[c] = score_linear(model.heads()[c], x);
            break;
        }
        case BackendKind::External: {
            std::vector<std::string> tokens = seg.tokens;
            if (tokens.size() > model.max_tokens()) tokens.resize(model.max_tokens());
            scores = model.external().score_tokens(tokens);
            break;
        }
    }
    return LabelScores::from_scores(scores, model.thresholds());
}

}  // namespace ppscan::classify
