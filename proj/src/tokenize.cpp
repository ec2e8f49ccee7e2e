#include "ppscan/tokenize.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "ppscan/errors.hpp"

namespace ppscan::prep {

StopwordSet::StopwordSet(std::vector<std::string> words) {
    for (auto& w : words) {
        std::transform(w.begin(), w.end(), w.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (!w.empty()) words_.insert(std::move(w));
    }
}

StopwordSet StopwordSet::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open stopword file: " + path.string());
    std::vector<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::size_t b = line.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        std::size_t e = line.find_last_not_of(" \t");
        words.push_back(line.substr(b, e - b + 1));
    }
    return StopwordSet(std::move(words));
}

std::vector<std::string> split_alpha_tokens(const std::string& text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (char raw : text) {
        unsigned char c = static_cast<unsigned char>(raw);
        if (std::isalpha(c) && c < 0x80) {
            cur += static_cast<char>(std::tolower(c));
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

std::vector<std::string> tokenize(const std::string& text, const StopwordSet& stopwords) {
    std::vector<std::string> tokens = split_alpha_tokens(text);
    tokens.erase(std::remove_if(tokens.begin(), tokens.end(),
                                [&](const std::string& t) { return stopwords.contains(t); }),
                 tokens.end());
    return tokens;
}

}  // namespace ppscan::prep
