#include "ppscan/corpus_store.hpp"

#include <algorithm>
#include <cstdio>
#include <fcntl.h>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "ppscan/errors.hpp"

namespace ppscan::ingest {

using json = nlohmann::ordered_json;

namespace {

json record_to_json(const PolicyRecord& r) {
    json j;
    j["app_id"] = r.entry.app_id;
    j["group"] = r.entry.group;
    j["url"] = r.entry.url;
    j["delisted"] = r.entry.delisted;
    j["availability"] = availability_name(r.availability);
    j["included"] = r.included();
    j["content_type"] = r.content_type;
    j["fetched_at"] = r.fetched_at;
    j["error"] = r.error.has_value() ? json(*r.error) : json(nullptr);
    return j;
}

PolicyRecord record_from_json(const json& j) {
    PolicyRecord r;
    r.entry.app_id = j.at("app_id").get<std::string>();
    r.entry.group = j.at("group").get<std::string>();
    r.entry.url = j.at("url").get<std::string>();
    r.entry.delisted = j.value("delisted", false);
    auto cls = availability_from_name(j.at("availability").get<std::string>());
    if (!cls) throw Error("meta.json has unknown availability class");
    r.availability = *cls;
    r.content_type = j.value("content_type", "");
    r.fetched_at = j.value("fetched_at", "");
    if (j.contains("error") && !j.at("error").is_null())
        r.error = j.at("error").get<std::string>();
    return r;
}

}  // namespace

std::string sanitize_app_id(const std::string& app_id) {
    std::string out;
    out.reserve(app_id.size());
    for (unsigned char c : app_id) {
        bool safe = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '.' || c == '_' || c == '-';
        if (safe) {
            out += static_cast<char>(c);
        } else {
            char buf[4];
            std::snprintf(buf, sizeof(buf), "%%%02X", c);
            out += buf;
        }
    }
    return out;
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    if (!path.parent_path().empty()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw Error("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

CorpusStore::CorpusStore(std::filesystem::path root) : root_(std::move(root)) {
    std::filesystem::create_directories(root_);
}

std::filesystem::path CorpusStore::app_dir(const std::string& app_id) const {
    return root_ / sanitize_app_id(app_id);
}

void CorpusStore::save_record(const PolicyRecord& record) {
    std::filesystem::path dir = app_dir(record.entry.app_id);
    atomic_write(dir / "raw.bin", record.raw_content);
    atomic_write(dir / "meta.json", record_to_json(record).dump(2) + "\n");
}

PolicyRecord CorpusStore::load_record(const std::string& app_id) const {
    std::filesystem::path dir = app_dir(app_id);
    PolicyRecord r = record_from_json(json::parse(read_file(dir / "meta.json")));
    r.raw_content = read_file(dir / "raw.bin");
    return r;
}

std::vector<std::string> CorpusStore::list_apps() const {
    std::vector<std::string> apps;
    if (!std::filesystem::exists(root_)) return apps;
    for (const auto& entry : std::filesystem::directory_iterator(root_)) {
        if (!entry.is_directory()) continue;
        if (entry.path().filename() == "reports") continue;
        std::filesystem::path meta = entry.path() / "meta.json";
        // The directory name is the sanitized form; the real app_id lives in
        // meta.json, and that is what the other accessors expect.
        if (std::filesystem::exists(meta))
            apps.push_back(json::parse(read_file(meta)).at("app_id").get<std::string>());
    }
    std::sort(apps.begin(), apps.end());
    return apps;
}

void CorpusStore::save_document(const extract::Document& doc) {
    std::filesystem::path dir = app_dir(doc.app_id);

    std::string text;
    for (std::size_t i = 0; i < doc.paragraphs.size(); ++i) {
        if (i > 0) text += "\n";
        text += doc.paragraphs[i].text;
        text += "\n";
    }
    atomic_write(dir / "text.txt", text);

    json segments = json::array();
    for (const auto& p : doc.paragraphs) {
        json s;
        s["index"] = p.index;
        s["text"] = p.text;
        s["word_count"] = p.word_count;
        s["emphasis"] = p.emphasis;
        segments.push_back(std::move(s));
    }
    json j;
    j["encoding"] = doc.encoding;
    j["segments"] = std::move(segments);
    atomic_write(dir / "segments.json", j.dump(2) + "\n");
}

extract::Document CorpusStore::load_document(const std::string& app_id,
                                             const std::string& group) const {
    json j = json::parse(read_file(app_dir(app_id) / "segments.json"));
    extract::Document doc;
    doc.app_id = app_id;
    doc.group = group;
    doc.encoding = j.value("encoding", "utf-8");
    for (const auto& s : j.at("segments")) {
        extract::Paragraph p;
        p.index = s.at("index").get<std::size_t>();
        p.text = s.at("text").get<std::string>();
        p.word_count = s.at("word_count").get<std::size_t>();
        p.emphasis = s.value("emphasis", false);
        doc.paragraphs.push_back(std::move(p));
    }
    return doc;
}

bool CorpusStore::has_document(const std::string& app_id) const {
    return std::filesystem::exists(app_dir(app_id) / "segments.json");
}

void CorpusStore::save_prepared(const prep::PreparedDocument& doc) {
    json j;
    j["app_id"] = doc.app_id;
    j["group"] = doc.group;
    j["kept"] = doc.kept;
    j["drop_reason"] =
        doc.doc_drop_reason ? json(prep::doc_drop_reason_name(*doc.doc_drop_reason)) : json(nullptr);
    json segments = json::array();
    for (const auto& seg : doc.segments) {
        json s;
        s["index"] = seg.paragraph.index;
        s["word_count"] = seg.paragraph.word_count;
        s["kept"] = seg.kept;
        s["drop_reason"] =
            seg.drop_reason ? json(prep::drop_reason_name(*seg.drop_reason)) : json(nullptr);
        s["tokens"] = seg.tokens;
        segments.push_back(std::move(s));
    }
    j["segments"] = std::move(segments);
    atomic_write(app_dir(doc.app_id) / "prep.json", j.dump(2) + "\n");
}

prep::PreparedDocument CorpusStore::load_prepared(const std::string& app_id) const {
    json j = json::parse(read_file(app_dir(app_id) / "prep.json"));
    prep::PreparedDocument doc;
    doc.app_id = j.at("app_id").get<std::string>();
    doc.group = j.at("group").get<std::string>();
    doc.kept = j.at("kept").get<bool>();
    if (!j.at("drop_reason").is_null()) {
        std::string r = j.at("drop_reason").get<std::string>();
        doc.doc_drop_reason = r == "NoPrivacyTerm" ? prep::DocDropReason::NoPrivacyTerm
                                                   : prep::DocDropReason::LowKeyTerms;
    }
    // Paragraph text is not duplicated into prep.json; reload it when needed.
    extract::Document source;
    bool have_source = has_document(app_id);
    if (have_source) source = load_document(app_id, doc.group);

    for (const auto& s : j.at("segments")) {
        prep::TokenizedSegment seg;
        seg.paragraph.index = s.at("index").get<std::size_t>();
        seg.paragraph.word_count = s.at("word_count").get<std::size_t>();
        if (have_source && seg.paragraph.index < source.paragraphs.size()) {
            seg.paragraph = source.paragraphs[seg.paragraph.index];
        }
        seg.kept = s.at("kept").get<bool>();
        if (!s.at("drop_reason").is_null()) {
            std::string r = s.at("drop_reason").get<std::string>();
            seg.drop_reason =
                r == "TooShort" ? prep::DropReason::TooShort : prep::DropReason::DocumentExcluded;
        }
        seg.tokens = s.at("tokens").get<std::vector<std::string>>();
        doc.segments.push_back(std::move(seg));
    }
    return doc;
}

bool CorpusStore::has_prepared(const std::string& app_id) const {
    return std::filesystem::exists(app_dir(app_id) / "prep.json");
}

CorpusLock::CorpusLock(const std::filesystem::path& corpus_dir) {
    std::filesystem::create_directories(corpus_dir);
    lock_path_ = corpus_dir / ".lock";
    int fd = ::open(lock_path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
        throw Error("corpus directory is locked by another run: " + lock_path_.string() +
                    " (remove the file if that run is gone)");
    }
    std::string pid = std::to_string(::getpid()) + "\n";
    [[maybe_unused]] ssize_t n = ::write(fd, pid.data(), pid.size());
    ::close(fd);
    held_ = true;
}

CorpusLock::~CorpusLock() {
    if (held_) {
        std::error_code ec;
        std::filesystem::remove(lock_path_, ec);
    }
}

}  // namespace ppscan::ingest
