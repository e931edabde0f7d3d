#pragma once

#include <cstdio>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "conjlab/error.hpp"

namespace conjlab::store {

// Append-only JSON Lines record file. Opening scans the file: a partial
// trailing line (crash artifact) is moved to "<path>.partial" and the main
// file truncated back to its valid prefix, so readers never see half a
// record. Every line must carry the file's schema_version.
class RecordFile {
public:
    // Creates the file when absent. Throws IoFailure / SchemaMismatch.
    static RecordFile open(const std::string& path, int schema_version);

    RecordFile(RecordFile&& other) noexcept;
    RecordFile& operator=(RecordFile&& other) noexcept;
    RecordFile(const RecordFile&) = delete;
    RecordFile& operator=(const RecordFile&) = delete;
    ~RecordFile();

    // Durably appends one record (written + flushed before returning).
    void append(const nlohmann::ordered_json& record);

    const std::vector<nlohmann::json>& records() const { return records_; }
    std::size_t line_count() const { return records_.size(); }
    const std::string& path() const { return path_; }
    int schema_version() const { return schema_version_; }
    bool quarantined_partial() const { return quarantined_; }

private:
    RecordFile() = default;

    std::string path_;
    int schema_version_ = 0;
    std::FILE* file_ = nullptr;
    std::vector<nlohmann::json> records_;
    bool quarantined_ = false;
};

// Index of the first plan item without a durable record; plan.size() when
// everything is already present. key_of maps a stored record back to its
// plan key.
std::size_t resume_cursor(const RecordFile& file, std::span<const std::string> plan_keys,
                          const std::function<std::string(const nlohmann::json&)>& key_of);

// Flat tabular projection of records. Columns address fields by dotted
// path ("triplet.a"); list values are joined with semicolons; cells are
// quoted RFC-4180 style when needed. Throws UnknownColumn for a path no
// record carries.
std::string export_csv(std::span<const nlohmann::json> records,
                       std::span<const std::string> columns, bool crlf = false);

}  // namespace conjlab::store
