#ifndef PPSCAN_LEXICON_HPP
#define PPSCAN_LEXICON_HPP

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "ppscan/category.hpp"

namespace ppscan::classify {

// Keyword baseline: each category carries a list of lowercase phrases; a
// phrase fires when it appears as a whole-word sequence in the segment text.
class Lexicon {
public:
    Lexicon() = default;

    // JSON file: {"version": 1, "categories": {"DoNotTrack": ["do not track", ...], ...}}
    static Lexicon load(const std::filesystem::path& path);
    static Lexicon from_phrases(
        const std::array<std::vector<std::string>, kNumCategories>& phrases);

    const std::vector<std::string>& phrases(Category c) const {
        return phrases_[category_index(c)];
    }

    // True when any phrase of the category occurs in the text. `text` must
    // already be normalized with normalize_for_match().
    bool matches(Category c, const std::string& normalized_text) const;

    int version() const { return version_; }

    // Lowercases and maps every non-alphanumeric character to a space, then
    // collapses runs; phrases and segment text go through the same rule so
    // matching is word-aligned ("opt-out" == "opt out").
    static std::string normalize_for_match(const std::string& text);

private:
    std::array<std::vector<std::string>, kNumCategories> phrases_;
    int version_ = 1;
};

}  // namespace ppscan::classify

#endif
