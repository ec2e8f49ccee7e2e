#ifndef PPSCAN_ANNOTATED_HPP
#define PPSCAN_ANNOTATED_HPP

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ppscan/category.hpp"

namespace ppscan::classify {

// Subset of the nine categories, stored as bits in canonical order.
struct CategorySet {
    std::array<bool, kNumCategories> bits{};

    bool has(Category c) const { return bits[category_index(c)]; }
    void add(Category c) { bits[category_index(c)] = true; }
    void remove(Category c) { bits[category_index(c)] = false; }

    std::size_t count() const;
    std::vector<Category> to_list() const;  // canonical order

    // Bit string like "100000010"; groups identically labeled segments for
    // stratification.
    std::string signature() const;

    bool operator==(const CategorySet&) const = default;
};

// A gold-labeled segment, the unit of training and evaluation data.
struct AnnotatedSegment {
    std::string text;
    CategorySet gold;
};

// JSON-lines: one {"text": ..., "labels": [...]} object per line. Blank
// lines are skipped; anything else malformed raises MalformedAnnotation with
// its 1-based line number.
std::vector<AnnotatedSegment> parse_annotated_jsonl(std::istream& in);
std::vector<AnnotatedSegment> read_annotated_jsonl(const std::filesystem::path& path);
void write_annotated_jsonl(const std::filesystem::path& path,
                           const std::vector<AnnotatedSegment>& segments);

}  // namespace ppscan::classify

#endif
