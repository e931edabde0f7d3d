#include "conjlab/store.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "conjlab/jsontext.hpp"

namespace conjlab::store {

namespace fs = std::filesystem;

RecordFile RecordFile::open(const std::string& path, int schema_version) {
    RecordFile rf;
    rf.path_ = path;
    rf.schema_version_ = schema_version;

    std::string content;
    if (fs::exists(path)) {
        std::ifstream in(path, std::ios::binary);
        if (!in) fail_io("IoFailure", "cannot read " + path);
        std::ostringstream buf;
        buf << in.rdbuf();
        content = buf.str();
    }

    // Quarantine a partial trailing line before parsing anything.
    if (!content.empty() && content.back() != '\n') {
        const std::size_t cut = content.find_last_of('\n');
        const std::size_t keep = cut == std::string::npos ? 0 : cut + 1;
        const std::string tail = content.substr(keep);
        std::ofstream side(path + ".partial", std::ios::binary | std::ios::app);
        if (!side) fail_io("IoFailure", "cannot write quarantine sidecar for " + path);
        side << tail << '\n';
        side.close();
        content.resize(keep);
        std::error_code ec;
        fs::resize_file(path, keep, ec);
        if (ec) fail_io("IoFailure", "cannot truncate partial line in " + path);
        rf.quarantined_ = true;
    }

    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < content.size()) {
        const std::size_t eol = content.find('\n', pos);
        const std::string line = content.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json rec = nlohmann::json::parse(line, nullptr, false);
        if (rec.is_discarded()) {
            fail_io("IoFailure",
                    path + ":" + std::to_string(line_no) + ": line is not valid JSON");
        }
        if (!rec.is_object() || !rec.contains("schema_version") ||
            !rec["schema_version"].is_number_integer() ||
            rec["schema_version"].get<int>() != schema_version) {
            fail_validation("SchemaMismatch",
                            path + ":" + std::to_string(line_no) + ": expected schema_version " +
                                std::to_string(schema_version));
        }
        rf.records_.push_back(std::move(rec));
    }

    rf.file_ = std::fopen(path.c_str(), "ab");
    if (rf.file_ == nullptr) fail_io("IoFailure", "cannot open " + path + " for appending");
    return rf;
}

RecordFile::RecordFile(RecordFile&& other) noexcept
    : path_(std::move(other.path_)),
      schema_version_(other.schema_version_),
      file_(other.file_),
      records_(std::move(other.records_)),
      quarantined_(other.quarantined_) {
    other.file_ = nullptr;
}

RecordFile& RecordFile::operator=(RecordFile&& other) noexcept {
    if (this != &other) {
        if (file_ != nullptr) std::fclose(file_);
        path_ = std::move(other.path_);
        schema_version_ = other.schema_version_;
        file_ = other.file_;
        records_ = std::move(other.records_);
        quarantined_ = other.quarantined_;
        other.file_ = nullptr;
    }
    return *this;
}

RecordFile::~RecordFile() {
    if (file_ != nullptr) std::fclose(file_);
}

void RecordFile::append(const nlohmann::ordered_json& record) {
    if (!record.is_object() || !record.contains("schema_version") ||
        record["schema_version"] != schema_version_) {
        fail_validation("SchemaMismatch", "record schema_version does not match file (" +
                                              std::to_string(schema_version_) + ")");
    }
    const std::string line = jsontext::dump(record) + "\n";
    if (std::fwrite(line.data(), 1, line.size(), file_) != line.size() ||
        std::fflush(file_) != 0) {
        fail_io("IoFailure", "append to " + path_ + " failed");
    }
    records_.push_back(nlohmann::json::parse(line));
}

std::size_t resume_cursor(const RecordFile& file, std::span<const std::string> plan_keys,
                          const std::function<std::string(const nlohmann::json&)>& key_of) {
    std::set<std::string> done;
    for (const auto& rec : file.records()) done.insert(key_of(rec));
    for (std::size_t i = 0; i < plan_keys.size(); ++i) {
        if (!done.contains(plan_keys[i])) return i;
    }
    return plan_keys.size();
}

namespace {

const nlohmann::json* lookup_path(const nlohmann::json& rec, const std::string& dotted) {
    const nlohmann::json* cur = &rec;
    std::size_t pos = 0;
    while (pos <= dotted.size()) {
        const std::size_t dotp = dotted.find('.', pos);
        const std::string part = dotted.substr(pos, dotp - pos);
        if (!cur->is_object() || !cur->contains(part)) return nullptr;
        cur = &(*cur)[part];
        if (dotp == std::string::npos) return cur;
        pos = dotp + 1;
    }
    return nullptr;
}

std::string scalar_text(const nlohmann::json& v) {
    switch (v.type()) {
        case nlohmann::json::value_t::null: return "";
        case nlohmann::json::value_t::string: return v.get<std::string>();
        case nlohmann::json::value_t::boolean: return v.get<bool>() ? "true" : "false";
        case nlohmann::json::value_t::number_integer:
            return std::to_string(v.get<std::int64_t>());
        case nlohmann::json::value_t::number_unsigned:
            return std::to_string(v.get<std::uint64_t>());
        case nlohmann::json::value_t::number_float:
            return jsontext::format_double(v.get<double>());
        default: return v.dump();
    }
}

std::string cell_text(const nlohmann::json& v) {
    if (v.is_array()) {
        std::string out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i > 0) out += ';';
            out += scalar_text(v[i]);
        }
        return out;
    }
    return scalar_text(v);
}

std::string quoted_if_needed(const std::string& cell) {
    if (cell.find_first_of(",\"\n\r") == std::string::npos) return cell;
    std::string out = "\"";
    for (char ch : cell) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

}  // namespace

std::string export_csv(std::span<const nlohmann::json> records,
                       std::span<const std::string> columns, bool crlf) {
    for (const std::string& col : columns) {
        bool known = false;
        for (const auto& rec : records) {
            if (lookup_path(rec, col) != nullptr) {
                known = true;
                break;
            }
        }
        if (!known && !records.empty()) {
            fail_validation("UnknownColumn", "no record carries column \"" + col + "\"");
        }
    }

    const char* eol = crlf ? "\r\n" : "\n";
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i > 0) out += ',';
        out += quoted_if_needed(columns[i]);
    }
    out += eol;
    for (const auto& rec : records) {
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (i > 0) out += ',';
            const nlohmann::json* v = lookup_path(rec, columns[i]);
            out += quoted_if_needed(v == nullptr ? "" : cell_text(*v));
        }
        out += eol;
    }
    return out;
}

}  // namespace conjlab::store
