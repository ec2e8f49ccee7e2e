#include "ppscan/run_config.hpp"

#include <fstream>

#include "ppscan/errors.hpp"

namespace ppscan {

classify::ThresholdVector RunConfig::resolve_thresholds(
    const classify::ThresholdVector& base) const {
    classify::ThresholdVector out = base;
    if (threshold) out = classify::uniform_thresholds(*threshold);
    for (const auto& [name, value] : category_thresholds) {
        auto c = category_from_name(name);
        if (!c) throw Error("unknown category in thresholds: " + name);
        out[category_index(*c)] = value;
    }
    return out;
}

namespace {

double number_field(const nlohmann::json& v, const std::string& key) {
    if (!v.is_number()) throw Error("config field \"" + key + "\" must be a number");
    return v.get<double>();
}

std::string string_field(const nlohmann::json& v, const std::string& key) {
    if (!v.is_string()) throw Error("config field \"" + key + "\" must be a string");
    return v.get<std::string>();
}

void parse_fetch(const nlohmann::json& doc, ingest::FetchOptions& fetch) {
    if (!doc.is_object()) throw Error("config field \"fetch\" must be an object");
    for (const auto& [key, value] : doc.items()) {
        if (key == "timeout_seconds")
            fetch.timeout_seconds = static_cast<int>(number_field(value, key));
        else if (key == "retries")
            fetch.retries = static_cast<int>(number_field(value, key));
        else if (key == "parallelism")
            fetch.parallelism = static_cast<std::size_t>(number_field(value, key));
        else if (key == "politeness_delay_ms")
            fetch.politeness_delay_ms = static_cast<int>(number_field(value, key));
        else if (key == "user_agent")
            fetch.user_agent = string_field(value, key);
        else
            throw Error("unknown config key: fetch." + key);
    }
}

void parse_references(const nlohmann::json& doc, std::array<ReferencePair, 3>& references) {
    if (!doc.is_object()) throw Error("config field \"references\" must be an object");
    for (const auto& [kind_name, pair] : doc.items()) {
        metrics::MetricKind kind = metrics::metric_kind_from_name(kind_name);
        if (!pair.is_object())
            throw Error("config references." + kind_name + " must be an object");
        for (const auto& [side, value] : pair.items()) {
            if (side == "free")
                references[static_cast<std::size_t>(kind)].free =
                    string_field(value, "references");
            else if (side == "premium")
                references[static_cast<std::size_t>(kind)].premium =
                    string_field(value, "references");
            else
                throw Error("unknown config key: references." + kind_name + "." + side);
        }
    }
}

}  // namespace

RunConfig parse_run_config(const nlohmann::json& doc, RunConfig base) {
    if (!doc.is_object()) throw Error("config must be a JSON object");
    RunConfig config = std::move(base);
    for (const auto& [key, value] : doc.items()) {
        if (key == "version") {
            if (!value.is_number_integer() || value.get<int>() != 1)
                throw Error("unsupported config version (expected 1)");
        } else if (key == "corpus_dir") {
            config.corpus_dir = string_field(value, key);
        } else if (key == "manifest") {
            config.manifest = string_field(value, key);
        } else if (key == "stopwords") {
            config.stopwords = string_field(value, key);
        } else if (key == "lexicon") {
            config.lexicon = string_field(value, key);
        } else if (key == "model") {
            config.model = string_field(value, key);
        } else if (key == "threshold") {
            config.threshold = number_field(value, key);
        } else if (key == "thresholds") {
            if (!value.is_object()) throw Error("config field \"thresholds\" must be an object");
            for (const auto& [cat, t] : value.items())
                config.category_thresholds[cat] = number_field(t, "thresholds." + cat);
        } else if (key == "fetch") {
            parse_fetch(value, config.fetch);
        } else if (key == "seed") {
            config.seed = static_cast<std::uint32_t>(number_field(value, key));
        } else if (key == "formats") {
            if (!value.is_array()) throw Error("config field \"formats\" must be an array");
            config.formats.clear();
            for (const auto& item : value) {
                auto f = report::format_from_name(string_field(item, "formats"));
                if (!f) throw Error("unknown report format: " + item.get<std::string>());
                config.formats.push_back(*f);
            }
            if (config.formats.empty()) throw Error("config \"formats\" must not be empty");
        } else if (key == "references") {
            parse_references(value, config.references);
        } else {
            throw Error("unknown config key: " + key);
        }
    }
    for (const auto& [name, value] : config.category_thresholds) {
        if (!category_from_name(name)) throw Error("unknown category in thresholds: " + name);
        if (value < 0.0 || value > 1.0)
            throw Error("threshold for " + name + " must be in [0, 1]");
    }
    if (config.threshold && (*config.threshold < 0.0 || *config.threshold > 1.0))
        throw Error("threshold must be in [0, 1]");
    return config;
}

RunConfig load_run_config(const std::filesystem::path& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file: " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw Error("config file " + path.string() + " is not valid JSON: " + e.what());
    }
    return parse_run_config(doc, std::move(base));
}

}  // namespace ppscan
