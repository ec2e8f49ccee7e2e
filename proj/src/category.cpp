#include "ppscan/category.hpp"

#include <unordered_map>

namespace ppscan {

namespace {

const std::array<std::string, kNumCategories> kNames = {
    "FirstPartyUse", "ThirdPartySharing", "UserChoice",
    "UserAccess",    "DataRetention",     "DataSecurity",
    "PolicyChange",  "DoNotTrack",        "SpecificAudiences",
};

const std::array<std::string, kNumCategories> kDisplayNames = {
    "1st Party Use", "3rd Party Sharing", "User Choice",
    "User Access",   "Data Retention",    "Data Security",
    "Policy Change", "Do Not Track",      "Specific Audiences",
};

}  // namespace

const std::string& category_name(Category c) { return kNames[category_index(c)]; }

const std::string& category_display_name(Category c) { return kDisplayNames[category_index(c)]; }

std::optional<Category> category_from_name(const std::string& name) {
    static const std::unordered_map<std::string, Category> lookup = [] {
        std::unordered_map<std::string, Category> m;
        for (Category c : kAllCategories) m.emplace(kNames[category_index(c)], c);
        return m;
    }();
    auto it = lookup.find(name);
    if (it == lookup.end()) return std::nullopt;
    return it->second;
}

}  // namespace ppscan
