#ifndef PPSCAN_TOKENIZE_HPP
#define PPSCAN_TOKENIZE_HPP

#include <filesystem>
#include <string>
#include <unordered_set>
#include <vector>

namespace ppscan::prep {

class StopwordSet {
public:
    StopwordSet() = default;
    explicit StopwordSet(std::vector<std::string> words);

    // One word per line, UTF-8, '#' starts a comment line.
    static StopwordSet load(const std::filesystem::path& path);

    bool contains(const std::string& word) const { return words_.count(word) > 0; }
    std::size_t size() const { return words_.size(); }
    bool empty() const { return words_.empty(); }

private:
    std::unordered_set<std::string> words_;
};

// Lowercases, splits on anything that is not an ASCII letter, and keeps the
// resulting purely-alphabetic tokens in order. Does NOT remove stopwords.
std::vector<std::string> split_alpha_tokens(const std::string& text);

// split_alpha_tokens + stopword removal: the analysis tokenization.
std::vector<std::string> tokenize(const std::string& text, const StopwordSet& stopwords);

}  // namespace ppscan::prep

#endif
