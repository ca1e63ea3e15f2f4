#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <string>
#include <vector>

#include "tdoc/ingest/tdoc_id.hpp"
#include "tdoc/ingest/types.hpp"
#include "tdoc/ingest/zip.hpp"
#include "tdoc/util/log.hpp"

namespace tdoc::ingest {

namespace fs = std::filesystem;

// One candidate document: a loose file, or a member of a (possibly nested)
// archive. `data` holds the raw bytes.
struct ArchiveEntry {
    std::string archive_path;         // root-relative path of the on-disk file
    std::vector<std::string> nested;  // nested archive members, outermost first
    std::string entry_path;           // member path in the innermost archive; empty for loose files
    std::string data;

    bool is_loose() const { return entry_path.empty(); }

    // Name the document is known by: the member path, or the loose file path.
    const std::string& filename() const { return is_loose() ? archive_path : entry_path; }

    std::string display() const {
        std::string s = archive_path;
        for (const auto& n : nested) s += "!" + n;
        if (!entry_path.empty()) s += "!" + entry_path;
        return s;
    }

    std::vector<std::string> dir_components() const {
        std::vector<std::string> out;
        auto add_dirs = [&](const std::string& p) {
            fs::path path(p);
            for (const auto& c : path.parent_path()) {
                std::string s = c.string();
                if (!s.empty() && s != "/" && s != ".") out.push_back(s);
            }
        };
        add_dirs(archive_path);
        for (const auto& n : nested) add_dirs(n);
        if (!entry_path.empty()) add_dirs(entry_path);
        return out;
    }

    // File names to try for a TDoc id, innermost first.
    std::vector<std::string> candidate_names() const {
        std::vector<std::string> out;
        if (!entry_path.empty()) out.emplace_back(basename(entry_path));
        for (auto it = nested.rbegin(); it != nested.rend(); ++it) out.emplace_back(basename(*it));
        out.emplace_back(basename(archive_path));
        return out;
    }
};

struct ScanReport {
    std::size_t files_seen = 0;
    std::size_t archives = 0;
    std::size_t corrupt_archives = 0;
    std::size_t corrupt_members = 0;
    std::size_t nested_depth_exceeded = 0;
    std::size_t ignored_files = 0;
    std::size_t entries = 0;
};

inline bool is_supported_document(std::string_view name) {
    std::string ext = extension_lower(name);
    return ext == ".docx" || ext == ".htm" || ext == ".html" || ext == ".txt" || ext == ".doc";
}

inline bool is_zip_name(std::string_view name) { return extension_lower(name) == ".zip"; }

namespace detail {

inline std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IngestError("cannot read " + p.string());
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

// depth: 1 for an archive on disk, 2 for an archive inside it, ...
inline void walk_archive(const std::string& archive_path, std::vector<std::string> nested, std::string bytes,
                         int depth, const IngestConfig& config, ScanReport& report,
                         const std::function<void(ArchiveEntry&&)>& sink) {
    ++report.archives;
    std::string where = archive_path;
    for (const auto& n : nested) where += "!" + n;
    std::optional<zip::Reader> reader;
    try {
        reader.emplace(std::move(bytes));
    } catch (const zip::ZipError& e) {
        ++report.corrupt_archives;
        log::warn("corrupt archive skipped: " + where + ": " + e.what());
        return;
    }
    std::vector<const zip::Member*> members;
    for (const auto& m : reader->members())
        if (!m.is_directory()) members.push_back(&m);
    std::sort(members.begin(), members.end(), [](auto* a, auto* b) { return a->name < b->name; });

    for (const zip::Member* m : members) {
        if (is_zip_name(m->name)) {
            if (depth + 1 > config.nested_zip_depth) {
                ++report.nested_depth_exceeded;
                log::warn("nested archive beyond depth " + std::to_string(config.nested_zip_depth) +
                          " skipped: " + where + "!" + m->name);
                continue;
            }
            std::string inner;
            try {
                inner = reader->read(*m);
            } catch (const zip::ZipError& e) {
                ++report.corrupt_members;
                log::warn("corrupt member skipped: " + where + "!" + m->name + ": " + e.what());
                continue;
            }
            auto next = nested;
            next.push_back(m->name);
            walk_archive(archive_path, std::move(next), std::move(inner), depth + 1, config, report, sink);
            continue;
        }
        ArchiveEntry entry;
        entry.archive_path = archive_path;
        entry.nested = nested;
        entry.entry_path = m->name;
        try {
            entry.data = reader->read(*m);
        } catch (const zip::ZipError& e) {
            ++report.corrupt_members;
            log::warn("corrupt member skipped: " + entry.display() + ": " + e.what());
            continue;
        }
        ++report.entries;
        sink(std::move(entry));
    }
}

}  // namespace detail

// Streams every member of every ZIP under root (recursing into nested
// archives up to config.nested_zip_depth) and every loose supported document,
// ordered by (archive path, entry path).
inline ScanReport scan_archives(const fs::path& root, const IngestConfig& config,
                                const std::function<void(ArchiveEntry&&)>& sink) {
    std::error_code ec;
    if (!fs::is_directory(root, ec)) throw IngestError("corpus root is not a readable directory: " + root.string());
    std::vector<fs::path> files;
    fs::recursive_directory_iterator it(root, fs::directory_options::none, ec), end;
    if (ec) throw IngestError("cannot read corpus root " + root.string() + ": " + ec.message());
    for (; it != end; it.increment(ec)) {
        if (ec) throw IngestError("cannot walk corpus root " + root.string() + ": " + ec.message());
        if (it->is_regular_file()) files.push_back(fs::relative(it->path(), root).generic_string());
    }
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.generic_string() < b.generic_string(); });

    ScanReport report;
    for (const auto& rel : files) {
        ++report.files_seen;
        std::string rel_str = rel.generic_string();
        if (is_zip_name(rel_str)) {
            detail::walk_archive(rel_str, {}, detail::read_file(root / rel), 1, config, report, sink);
        } else if (is_supported_document(rel_str)) {
            ArchiveEntry entry;
            entry.archive_path = rel_str;
            entry.data = detail::read_file(root / rel);
            ++report.entries;
            sink(std::move(entry));
        } else {
            ++report.ignored_files;
        }
    }
    return report;
}

inline std::vector<ArchiveEntry> scan_archives(const fs::path& root, const IngestConfig& config,
                                               ScanReport* report = nullptr) {
    std::vector<ArchiveEntry> out;
    ScanReport r = scan_archives(root, config, [&](ArchiveEntry&& e) { out.push_back(std::move(e)); });
    if (report) *report = r;
    return out;
}

}  // namespace tdoc::ingest
