#ifndef PPSCAN_CORPUS_STORE_HPP
#define PPSCAN_CORPUS_STORE_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "ppscan/extract.hpp"
#include "ppscan/policy_record.hpp"
#include "ppscan/prep.hpp"

namespace ppscan::ingest {

// On-disk corpus: one directory per app_id holding the stage outputs.
//
//   <corpus>/<app_id>/raw.bin        fetched bytes
//   <corpus>/<app_id>/meta.json      record fields + availability
//   <corpus>/<app_id>/text.txt       extracted paragraphs, blank-line separated
//   <corpus>/<app_id>/segments.json  [{index, text, word_count, emphasis}]
//   <corpus>/<app_id>/prep.json      tokenized segments + document filter verdict
//   <corpus>/<app_id>/scores.json    per-segment category scores/decisions
//   <corpus>/reports/                report bundle
//
// Every file is written atomically (temp file + rename) so reruns never leave
// a half-written stage behind.
class CorpusStore {
public:
    explicit CorpusStore(std::filesystem::path root);

    const std::filesystem::path& root() const { return root_; }
    std::filesystem::path app_dir(const std::string& app_id) const;
    std::filesystem::path reports_dir() const { return root_ / "reports"; }

    void save_record(const PolicyRecord& record);
    // Loads meta.json + raw.bin for one app.
    PolicyRecord load_record(const std::string& app_id) const;
    // All app_ids present in the store, sorted.
    std::vector<std::string> list_apps() const;

    void save_document(const extract::Document& doc);
    extract::Document load_document(const std::string& app_id, const std::string& group) const;
    bool has_document(const std::string& app_id) const;

    void save_prepared(const prep::PreparedDocument& doc);
    prep::PreparedDocument load_prepared(const std::string& app_id) const;
    bool has_prepared(const std::string& app_id) const;

private:
    std::filesystem::path root_;
};

// Atomic file write: write to a temp sibling, then rename over the target.
void atomic_write(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

// Directory-scoped exclusive lock. Creating the lock file fails when another
// process holds it; the destructor releases it.
class CorpusLock {
public:
    explicit CorpusLock(const std::filesystem::path& corpus_dir);
    ~CorpusLock();
    CorpusLock(const CorpusLock&) = delete;
    CorpusLock& operator=(const CorpusLock&) = delete;

private:
    std::filesystem::path lock_path_;
    bool held_ = false;
};

// File-system-safe directory name for an app_id: passes through
// [A-Za-z0-9._-] and percent-encodes everything else.
std::string sanitize_app_id(const std::string& app_id);

}  // namespace ppscan::ingest

#endif
