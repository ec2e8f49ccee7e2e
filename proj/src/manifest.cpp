#include "ppscan/manifest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "ppscan/errors.hpp"

namespace ppscan::ingest {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

// Splits one CSV line, honoring double-quoted fields.
std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

bool parse_bool_flag(const std::string& raw) {
    std::string v = lower(trim(raw));
    return v == "1" || v == "true" || v == "yes" || v == "y";
}

}  // namespace

bool is_valid_absolute_url(const std::string& url) {
    std::string scheme;
    std::size_t pos = url.find("://");
    if (pos == std::string::npos) return false;
    scheme = lower(url.substr(0, pos));
    if (scheme != "http" && scheme != "https") return false;
    std::string rest = url.substr(pos + 3);
    std::size_t host_end = rest.find_first_of("/?#");
    std::string authority = host_end == std::string::npos ? rest : rest.substr(0, host_end);
    return !authority.empty() && authority.find(' ') == std::string::npos;
}

std::vector<ManifestEntry> parse_manifest(const std::string& content) {
    std::istringstream in(content);
    std::string line;
    if (!std::getline(in, line)) throw MissingColumn("app_id");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    // Tolerate a UTF-8 BOM on the header line.
    if (line.rfind("\xEF\xBB\xBF", 0) == 0) line = line.substr(3);

    std::vector<std::string> header = split_csv_line(line);
    for (auto& h : header) h = lower(trim(h));

    auto col = [&](const std::string& name) -> long {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) return -1;
        return static_cast<long>(it - header.begin());
    };
    long app_col = col("app_id");
    long group_col = col("group");
    long url_col = col("url");
    long delisted_col = col("delisted");
    if (app_col < 0) throw MissingColumn("app_id");
    if (group_col < 0) throw MissingColumn("group");
    if (url_col < 0) throw MissingColumn("url");

    std::vector<ManifestEntry> entries;
    std::unordered_set<std::string> seen;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        std::vector<std::string> fields = split_csv_line(line);
        std::size_t needed = static_cast<std::size_t>(std::max({app_col, group_col, url_col})) + 1;
        if (fields.size() < needed)
            throw MalformedRow(line_no, "expected at least " + std::to_string(needed) + " fields");

        ManifestEntry e;
        e.app_id = trim(fields[static_cast<std::size_t>(app_col)]);
        e.group = trim(fields[static_cast<std::size_t>(group_col)]);
        e.url = trim(fields[static_cast<std::size_t>(url_col)]);
        if (delisted_col >= 0 && static_cast<std::size_t>(delisted_col) < fields.size())
            e.delisted = parse_bool_flag(fields[static_cast<std::size_t>(delisted_col)]);

        if (e.app_id.empty()) throw MalformedRow(line_no, "empty app_id");
        if (!is_valid_absolute_url(e.url))
            throw MalformedRow(line_no, "invalid absolute URL: " + e.url);
        if (!seen.insert(e.app_id).second) throw DuplicateAppId(e.app_id);
        entries.push_back(std::move(e));
    }
    return entries;
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open manifest: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_manifest(buf.str());
}

}  // namespace ppscan::ingest
