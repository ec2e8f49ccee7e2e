#include "ppscan/lexicon.hpp"

#include <cctype>
#include <fstream>

#include <nlohmann/json.hpp>

#include "ppscan/errors.hpp"

namespace ppscan::classify {

using json = nlohmann::json;

std::string Lexicon::normalize_for_match(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (unsigned char c : text) {
        bool word_char = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
        if (c >= 'A' && c <= 'Z') {
            c = static_cast<unsigned char>(c - 'A' + 'a');
            word_char = true;
        }
        if (word_char) {
            if (pending_space && !out.empty()) out += ' ';
            pending_space = false;
            out += static_cast<char>(c);
        } else {
            pending_space = true;
        }
    }
    return out;
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open lexicon file: " + path.string());
    json j = json::parse(in);

    Lexicon lex;
    lex.version_ = j.value("version", 1);
    const json& cats = j.at("categories");
    for (Category c : kAllCategories) {
        auto it = cats.find(category_name(c));
        if (it == cats.end()) continue;
        for (const auto& phrase : *it)
            lex.phrases_[category_index(c)].push_back(
                normalize_for_match(phrase.get<std::string>()));
    }
    return lex;
}

Lexicon Lexicon::from_phrases(
    const std::array<std::vector<std::string>, kNumCategories>& phrases) {
    Lexicon lex;
    for (std::size_t i = 0; i < kNumCategories; ++i) {
        for (const auto& p : phrases[i]) lex.phrases_[i].push_back(normalize_for_match(p));
    }
    return lex;
}

bool Lexicon::matches(Category c, const std::string& normalized_text) const {
    const std::string padded = " " + normalized_text + " ";
    for (const auto& phrase : phrases_[category_index(c)]) {
        if (phrase.empty()) continue;
        if (padded.find(" " + phrase + " ") != std::string::npos) return true;
    }
    return false;
}

}  // namespace ppscan::classify
