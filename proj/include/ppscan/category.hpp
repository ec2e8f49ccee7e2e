#ifndef PPSCAN_CATEGORY_HPP
#define PPSCAN_CATEGORY_HPP

#include <array>
#include <cstddef>
#include <optional>
#include <string>

namespace ppscan {

// The nine privacy-practice categories. The enumerator order is the canonical
// order used everywhere: serialized score vectors, report rows, fold metrics.
enum class Category {
    FirstPartyUse = 0,
    ThirdPartySharing,
    UserChoice,
    UserAccess,
    DataRetention,
    DataSecurity,
    PolicyChange,
    DoNotTrack,
    SpecificAudiences,
};

inline constexpr std::size_t kNumCategories = 9;

inline constexpr std::array<Category, kNumCategories> kAllCategories = {
    Category::FirstPartyUse,  Category::ThirdPartySharing, Category::UserChoice,
    Category::UserAccess,     Category::DataRetention,     Category::DataSecurity,
    Category::PolicyChange,   Category::DoNotTrack,        Category::SpecificAudiences,
};

constexpr std::size_t category_index(Category c) { return static_cast<std::size_t>(c); }

// Machine name, used in JSON files and config keys ("FirstPartyUse", ...).
const std::string& category_name(Category c);

// Human name, used in report tables ("1st Party Use", ...).
const std::string& category_display_name(Category c);

// Inverse of category_name; nullopt for unknown strings.
std::optional<Category> category_from_name(const std::string& name);

}  // namespace ppscan

#endif
