#ifndef PPSCAN_MANIFEST_HPP
#define PPSCAN_MANIFEST_HPP

#include <filesystem>
#include <string>
#include <vector>

namespace ppscan::ingest {

// One row of the input manifest: which app, which group it belongs to, and
// where its privacy policy lives. `delisted` comes from the optional manifest
// column of the same name and marks apps no longer available in the store.
struct ManifestEntry {
    std::string app_id;
    std::string group;
    std::string url;
    bool delisted = false;
};

// True for http(s) URLs with a non-empty host.
bool is_valid_absolute_url(const std::string& url);

// Parses a UTF-8 delimited-text manifest with header `app_id,group,url[,delisted]`.
// Rows keep file order. Throws MissingColumn, DuplicateAppId, MalformedRow.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

// Same, over an already-loaded buffer (used by tests and the reader itself).
std::vector<ManifestEntry> parse_manifest(const std::string& content);

}  // namespace ppscan::ingest

#endif
