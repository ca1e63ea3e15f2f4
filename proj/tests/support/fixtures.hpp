#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "tdoc/ingest/zip.hpp"

namespace tdoc::fixtures {

namespace fs = std::filesystem;

// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<unsigned> counter{0};
        path_ = fs::temp_directory_path() /
                ("tdoc-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& rel) const { return path_ / rel; }

private:
    fs::path path_;
};

inline void write_file(const fs::path& p, const std::string& bytes) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

inline std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

inline std::string make_zip(const std::vector<std::pair<std::string, std::string>>& members) {
    zip::Writer w;
    for (const auto& [name, data] : members) w.add(name, data);
    return w.finish();
}

inline std::string wordml(const std::vector<std::string>& paragraphs, const std::string& extra_body = "") {
    std::string xml =
        "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>\n"
        "<w:document xmlns:w=\"http://schemas.openxmlformats.org/wordprocessingml/2006/main\"><w:body>";
    for (const auto& p : paragraphs) xml += "<w:p><w:r><w:t xml:space=\"preserve\">" + p + "</w:t></w:r></w:p>";
    xml += extra_body;
    xml += "</w:body></w:document>";
    return xml;
}

// A minimal OOXML package; `header` goes into a separate header part.
inline std::string make_docx(const std::vector<std::string>& paragraphs, const std::string& header = "",
                             const std::string& extra_body = "") {
    std::vector<std::pair<std::string, std::string>> parts = {
        {"[Content_Types].xml",
         "<?xml version=\"1.0\"?><Types xmlns=\"http://schemas.openxmlformats.org/package/2006/content-types\"/>"},
        {"word/document.xml", wordml(paragraphs, extra_body)},
    };
    if (!header.empty())
        parts.emplace_back("word/header1.xml",
                           "<w:hdr xmlns:w=\"http://schemas.openxmlformats.org/wordprocessingml/2006/main\">"
                           "<w:p><w:r><w:t>" + header + "</w:t></w:r></w:p></w:hdr>");
    return make_zip(parts);
}

}  // namespace tdoc::fixtures
