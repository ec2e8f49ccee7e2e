#include "ppscan/extract.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "ppscan/errors.hpp"

namespace ppscan::extract {

namespace {

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

// Collapse whitespace runs to single spaces and trim the ends.
std::string normalize_ws(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (char c : s) {
        if (is_space(c)) {
            pending_space = !out.empty();
        } else {
            if (pending_space) out += ' ';
            pending_space = false;
            out += c;
        }
    }
    return out;
}

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp >= 0xD800 && cp <= 0xDFFF) cp = 0xFFFD;
    if (cp > 0x10FFFF) cp = 0xFFFD;
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

const std::unordered_map<std::string, std::uint32_t>& named_entities() {
    static const std::unordered_map<std::string, std::uint32_t> table = {
        {"amp", '&'},      {"lt", '<'},       {"gt", '>'},       {"quot", '"'},
        {"apos", '\''},    {"nbsp", ' '},     {"ensp", ' '},     {"emsp", ' '},
        {"thinsp", ' '},   {"copy", 0xA9},    {"reg", 0xAE},     {"trade", 0x2122},
        {"sect", 0xA7},    {"para", 0xB6},    {"middot", 0xB7},  {"bull", 0x2022},
        {"hellip", 0x2026},{"ndash", 0x2013}, {"mdash", 0x2014},
        {"lsquo", 0x2018}, {"rsquo", 0x2019}, {"ldquo", 0x201C}, {"rdquo", 0x201D},
        {"laquo", 0xAB},   {"raquo", 0xBB},   {"times", 0xD7},   {"divide", 0xF7},
        {"deg", 0xB0},     {"plusmn", 0xB1},  {"frac12", 0xBD},  {"frac14", 0xBC},
        {"cent", 0xA2},    {"pound", 0xA3},   {"euro", 0x20AC},  {"yen", 0xA5},
        {"dagger", 0x2020},{"Dagger", 0x2021},{"permil", 0x2030},{"larr", 0x2190},
        {"rarr", 0x2192},  {"eacute", 0xE9},  {"egrave", 0xE8},  {"agrave", 0xE0},
        {"uuml", 0xFC},    {"ouml", 0xF6},    {"auml", 0xE4},    {"szlig", 0xDF},
        {"ccedil", 0xE7},  {"ntilde", 0xF1},  {"aacute", 0xE1},  {"iacute", 0xED},
        {"oacute", 0xF3},  {"uacute", 0xFA},  {"acirc", 0xE2},   {"ecirc", 0xEA},
        {"icirc", 0xEE},   {"ocirc", 0xF4},   {"ucirc", 0xFB},   {"oslash", 0xF8},
        {"aring", 0xE5},   {"aelig", 0xE6},   {"shy", 0xAD},
    };
    return table;
}

// Decodes the entity starting at s[i] (s[i] == '&'). On success appends the
// decoded character(s) and returns the index just past the entity; otherwise
// appends '&' literally and returns i + 1.
std::size_t decode_entity(const std::string& s, std::size_t i, std::string& out) {
    std::size_t semi = s.find(';', i + 1);
    if (semi == std::string::npos || semi - i > 12) {
        out += '&';
        return i + 1;
    }
    std::string body = s.substr(i + 1, semi - i - 1);
    if (body.empty()) {
        out += '&';
        return i + 1;
    }
    if (body[0] == '#') {
        std::uint32_t cp = 0;
        bool ok = false;
        if (body.size() > 2 && (body[1] == 'x' || body[1] == 'X')) {
            for (std::size_t k = 2; k < body.size(); ++k) {
                char c = body[k];
                if (!std::isxdigit(static_cast<unsigned char>(c))) return out += '&', i + 1;
                cp = cp * 16 + static_cast<std::uint32_t>(
                    std::isdigit(static_cast<unsigned char>(c)) ? c - '0'
                                                                : std::tolower(c) - 'a' + 10);
                ok = true;
            }
        } else {
            for (std::size_t k = 1; k < body.size(); ++k) {
                char c = body[k];
                if (!std::isdigit(static_cast<unsigned char>(c))) return out += '&', i + 1;
                cp = cp * 10 + static_cast<std::uint32_t>(c - '0');
                ok = true;
            }
        }
        if (!ok) {
            out += '&';
            return i + 1;
        }
        if (cp == 0xA0) cp = ' ';      // non-breaking space folds to plain space
        if (cp == 0xAD || cp == 0x200C || cp == 0x200D) return semi + 1;  // soft hyphen, zwnj/zwj
        append_utf8(out, cp);
        return semi + 1;
    }
    auto it = named_entities().find(body);
    if (it == named_entities().end()) {
        out += '&';
        return i + 1;
    }
    if (it->second == 0xAD) return semi + 1;
    append_utf8(out, it->second);
    return semi + 1;
}

const std::unordered_set<std::string>& block_elements() {
    static const std::unordered_set<std::string> set = {
        "p",        "div",     "section", "article", "main",    "header", "aside",
        "h1",       "h2",      "h3",      "h4",      "h5",      "h6",     "ul",
        "ol",       "li",      "dl",      "dt",      "dd",      "table",  "thead",
        "tbody",    "tfoot",   "tr",      "td",      "th",      "caption","blockquote",
        "pre",      "figure",  "figcaption", "address", "form", "fieldset", "legend",
        "details",  "summary", "center",  "hr",      "br",
    };
    return set;
}

const std::unordered_set<std::string>& skip_elements() {
    static const std::unordered_set<std::string> set = {
        "script", "style", "noscript", "head", "nav", "footer", "template", "svg", "iframe",
    };
    return set;
}

const std::unordered_set<std::string>& emphasis_elements() {
    static const std::unordered_set<std::string> set = {
        "h1", "h2", "h3", "h4", "h5", "h6", "b", "strong",
    };
    return set;
}

const std::unordered_set<std::string>& void_elements() {
    static const std::unordered_set<std::string> set = {
        "br",   "hr",    "img",   "input",  "meta", "link", "area",
        "base", "col",   "embed", "param",  "source", "track", "wbr",
    };
    return set;
}

struct Tag {
    std::string name;
    bool closing = false;
    bool self_closing = false;
    std::size_t end = 0;  // index just past '>'
};

// Parses the tag starting at html[pos] ('<'). Returns false when this is not
// actually a tag (stray '<' in text).
bool parse_tag(const std::string& html, std::size_t pos, Tag& tag) {
    std::size_t i = pos + 1;
    if (i >= html.size()) return false;
    tag.closing = html[i] == '/';
    if (tag.closing) ++i;
    if (i >= html.size() || !std::isalpha(static_cast<unsigned char>(html[i]))) return false;

    std::size_t name_start = i;
    while (i < html.size() &&
           (std::isalnum(static_cast<unsigned char>(html[i])) || html[i] == '-' || html[i] == ':'))
        ++i;
    tag.name = lower(html.substr(name_start, i - name_start));

    // Scan for '>' outside attribute quotes.
    char quote = 0;
    char prev = 0;
    for (; i < html.size(); ++i) {
        char c = html[i];
        if (quote) {
            if (c == quote) quote = 0;
        } else if (c == '"' || c == '\'') {
            quote = c;
        } else if (c == '>') {
            tag.self_closing = prev == '/';
            tag.end = i + 1;
            return true;
        }
        prev = c;
    }
    return false;
}

class HtmlExtractor {
public:
    explicit HtmlExtractor(const std::string& html) : html_(html) {}

    std::vector<Paragraph> run() {
        std::size_t i = 0;
        while (i < html_.size()) {
            char c = html_[i];
            if (c != '<') {
                if (c == '&') {
                    std::size_t before = buffer_.size();
                    i = decode_entity(html_, i, buffer_);
                    if (buffer_.size() > before) note_text(buffer_.substr(before));
                } else {
                    buffer_ += c;
                    if (!is_space(c)) note_char();
                    ++i;
                }
                continue;
            }
            i = handle_markup(i);
        }
        flush();
        return std::move(paragraphs_);
    }

private:
    std::size_t handle_markup(std::size_t pos) {
        if (html_.compare(pos, 4, "<!--") == 0) {
            std::size_t end = html_.find("-->", pos + 4);
            return end == std::string::npos ? html_.size() : end + 3;
        }
        if (html_.compare(pos, 9, "<![CDATA[") == 0) {
            std::size_t end = html_.find("]]>", pos + 9);
            return end == std::string::npos ? html_.size() : end + 3;
        }
        if (pos + 1 < html_.size() && (html_[pos + 1] == '!' || html_[pos + 1] == '?')) {
            std::size_t end = html_.find('>', pos + 1);
            return end == std::string::npos ? html_.size() : end + 1;
        }
        Tag tag;
        if (!parse_tag(html_, pos, tag)) {
            buffer_ += '<';
            note_char();
            return pos + 1;
        }

        if (!tag.closing && !tag.self_closing && (tag.name == "script" || tag.name == "style")) {
            return skip_raw_text(tag);
        }

        bool is_void = void_elements().count(tag.name) > 0;
        bool is_skip = skip_elements().count(tag.name) > 0;
        // Skip containers are block-level too: flush before the depth change
        // so text pending outside the container is not discarded with it.
        if (block_elements().count(tag.name) || is_skip) flush();

        if (!is_void && !tag.self_closing) {
            if (is_skip) {
                auto& depth = skip_depth_[tag.name];
                if (tag.closing) {
                    if (depth > 0) --depth;
                } else {
                    ++depth;
                }
                recompute_skip();
            }
            if (emphasis_elements().count(tag.name)) {
                auto& depth = emphasis_depth_[tag.name];
                if (tag.closing) {
                    if (depth > 0) --depth;
                } else {
                    ++depth;
                }
                recompute_emphasis();
            }
        }
        return tag.end;
    }

    // script/style hold raw text: skip to the matching close tag literally.
    std::size_t skip_raw_text(const Tag& open) {
        std::string needle = "</" + open.name;
        std::size_t i = open.end;
        for (;;) {
            std::size_t hit = find_ci(needle, i);
            if (hit == std::string::npos) return html_.size();
            std::size_t gt = html_.find('>', hit);
            if (gt == std::string::npos) return html_.size();
            return gt + 1;
        }
    }

    std::size_t find_ci(const std::string& needle, std::size_t from) const {
        auto it = std::search(html_.begin() + static_cast<long>(from), html_.end(), needle.begin(),
                              needle.end(), [](char a, char b) {
                                  return std::tolower(static_cast<unsigned char>(a)) ==
                                         std::tolower(static_cast<unsigned char>(b));
                              });
        return it == html_.end() ? std::string::npos
                                 : static_cast<std::size_t>(it - html_.begin());
    }

    void recompute_skip() {
        skipping_ = false;
        for (const auto& [name, depth] : skip_depth_) {
            if (depth > 0) {
                skipping_ = true;
                return;
            }
        }
    }

    void recompute_emphasis() {
        in_emphasis_ = false;
        for (const auto& [name, depth] : emphasis_depth_) {
            if (depth > 0) {
                in_emphasis_ = true;
                return;
            }
        }
    }

    // Called whenever a non-whitespace character landed in the buffer.
    void note_char() {
        if (skipping_) {
            trim_last_char();
            return;
        }
        if (in_emphasis_) emphasized_ = true;
    }

    // Entity decodings may append several bytes at once.
    void note_text(const std::string& appended) {
        if (skipping_) {
            buffer_.resize(buffer_.size() - appended.size());
            return;
        }
        bool has_ink = std::any_of(appended.begin(), appended.end(),
                                   [](char c) { return !is_space(c); });
        if (has_ink && in_emphasis_) emphasized_ = true;
    }

    void trim_last_char() { buffer_.pop_back(); }

    void flush() {
        if (skipping_) {
            buffer_.clear();
            emphasized_ = false;
            return;
        }
        std::string text = normalize_ws(buffer_);
        buffer_.clear();
        if (!text.empty()) {
            Paragraph p;
            p.index = paragraphs_.size();
            p.text = std::move(text);
            p.word_count = count_words(p.text);
            p.emphasis = emphasized_;
            paragraphs_.push_back(std::move(p));
        }
        emphasized_ = false;
    }

    const std::string& html_;
    std::string buffer_;
    std::vector<Paragraph> paragraphs_;
    std::unordered_map<std::string, int> skip_depth_;
    std::unordered_map<std::string, int> emphasis_depth_;
    bool skipping_ = false;
    bool in_emphasis_ = false;
    bool emphasized_ = false;
};

bool has_binary_payload(const std::string& bytes) {
    std::size_t window = std::min<std::size_t>(bytes.size(), 4096);
    std::size_t controls = 0;
    for (std::size_t i = 0; i < window; ++i) {
        unsigned char c = static_cast<unsigned char>(bytes[i]);
        if (c == 0) return true;
        if (c < 0x20 && c != '\t' && c != '\n' && c != '\r' && c != '\f') ++controls;
    }
    return window > 0 && controls * 10 > window;  // >10% control bytes
}

bool valid_utf8(const std::string& bytes) {
    std::size_t i = 0;
    while (i < bytes.size()) {
        unsigned char c = static_cast<unsigned char>(bytes[i]);
        std::size_t extra;
        if (c < 0x80) extra = 0;
        else if ((c & 0xE0) == 0xC0) extra = 1;
        else if ((c & 0xF0) == 0xE0) extra = 2;
        else if ((c & 0xF8) == 0xF0) extra = 3;
        else return false;
        for (std::size_t k = 1; k <= extra; ++k) {
            if (i + k >= bytes.size()) return false;
            if ((static_cast<unsigned char>(bytes[i + k]) & 0xC0) != 0x80) return false;
        }
        i += extra + 1;
    }
    return true;
}

}  // namespace

std::size_t count_words(const std::string& text) {
    std::size_t count = 0;
    bool in_word = false;
    for (char c : text) {
        if (is_space(c)) {
            in_word = false;
        } else if (!in_word) {
            in_word = true;
            ++count;
        }
    }
    return count;
}

bool looks_like_html(const std::string& content) {
    static const std::array<const char*, 22> markers = {
        "<!doctype", "<html", "<head", "<body",  "<p>",    "<p ",    "<div",   "<br",
        "<span",     "<h1",   "<h2",   "<h3",    "<li",    "<ul",    "<ol",    "<table",
        "<a href",   "<meta", "<title","<strong","<script","<style",
    };
    std::string haystack = lower(content.substr(0, 8192));
    for (const char* marker : markers) {
        if (haystack.find(marker) != std::string::npos) return true;
    }
    return false;
}

bool contains_image_element(const std::string& content) {
    static const std::array<const char*, 4> names = {"img", "picture", "svg", "image"};
    std::string haystack = lower(content);
    for (const char* name : names) {
        std::string needle = std::string("<") + name;
        std::size_t pos = 0;
        while ((pos = haystack.find(needle, pos)) != std::string::npos) {
            std::size_t after = pos + needle.size();
            if (after >= haystack.size()) return true;
            char c = haystack[after];
            if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '>' || c == '/')
                return true;
            ++pos;
        }
    }
    return false;
}

std::vector<Paragraph> extract_html(const std::string& html) {
    return HtmlExtractor(html).run();
}

std::vector<Paragraph> extract_plain_text(const std::string& text) {
    std::vector<Paragraph> paragraphs;
    std::istringstream in(text);
    std::string line;
    std::string current;

    auto flush = [&] {
        std::string norm = normalize_ws(current);
        current.clear();
        if (norm.empty()) return;
        Paragraph p;
        p.index = paragraphs.size();
        p.text = std::move(norm);
        p.word_count = count_words(p.text);
        paragraphs.push_back(std::move(p));
    };

    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (normalize_ws(line).empty()) {
            flush();
        } else {
            if (!current.empty()) current += ' ';
            current += line;
        }
    }
    flush();
    return paragraphs;
}

std::pair<std::string, std::string> decode_bytes(const std::string& bytes) {
    if (has_binary_payload(bytes)) throw UnparseableContent("binary payload");
    if (valid_utf8(bytes)) return {bytes, "utf-8"};
    std::string out;
    out.reserve(bytes.size() * 2);
    for (char b : bytes) append_utf8(out, static_cast<unsigned char>(b));
    return {out, "latin-1"};
}

Document extract_text(const ingest::PolicyRecord& record) {
    auto [text, encoding] = decode_bytes(record.raw_content);

    Document doc;
    doc.app_id = record.entry.app_id;
    doc.group = record.entry.group;
    doc.encoding = encoding;

    bool html = record.content_type == "text/html" ||
                record.content_type == "application/xhtml+xml" || looks_like_html(text);
    doc.paragraphs = html ? extract_html(text) : extract_plain_text(text);
    return doc;
}

std::pair<std::size_t, std::size_t> document_stats(const Document& doc) {
    std::size_t words = 0;
    for (const auto& p : doc.paragraphs) words += p.word_count;
    return {doc.paragraphs.size(), words};
}

}  // namespace ppscan::extract
