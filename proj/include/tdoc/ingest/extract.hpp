#pragma once

#include <unistd.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <variant>

#include "tdoc/ingest/doc_kind.hpp"
#include "tdoc/ingest/docx.hpp"
#include "tdoc/ingest/scan.hpp"
#include "tdoc/ingest/tdoc_id.hpp"
#include "tdoc/ingest/types.hpp"
#include "tdoc/util/text.hpp"

namespace tdoc::ingest {

struct Skip {
    std::string reason;
    std::string detail;
};

struct ExtractResult {
    std::variant<RawDoc, Skip> value;
    bool wg_conflict = false;

    bool ok() const { return std::holds_alternative<RawDoc>(value); }
    const RawDoc& doc() const { return std::get<RawDoc>(value); }
    RawDoc& doc() { return std::get<RawDoc>(value); }
    const Skip& skip() const { return std::get<Skip>(value); }
};

namespace detail {

inline std::string replace_all(std::string s, std::string_view from, std::string_view to) {
    for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size())
        s.replace(pos, from.size(), to);
    return s;
}

inline std::string shell_quote(const std::string& s) { return "'" + replace_all(s, "'", "'\\''") + "'"; }

// Runs the configured converter on a temp copy; nullopt on failure.
inline std::optional<std::string> run_converter(const std::string& command_template, const std::string& bytes) {
    static std::atomic<unsigned> counter{0};
    auto dir = std::filesystem::temp_directory_path() /
               ("tdoc-conv-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(dir);
    auto in = dir / "input.doc";
    auto out = dir / "output.txt";
    {
        std::ofstream f(in, std::ios::binary);
        f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    }
    std::string cmd = replace_all(replace_all(command_template, "{in}", shell_quote(in.string())), "{out}",
                                  shell_quote(out.string()));
    int rc = std::system(cmd.c_str());
    std::optional<std::string> result;
    if (rc == 0 && std::filesystem::exists(out)) result = read_file(out);
    std::error_code ec;
    std::filesystem::remove_all(dir, ec);
    return result;
}

}  // namespace detail

// Resolves metadata, extracts text, and classifies the document kind. Every
// failure is a Skip with a stable reason string for the ingest report.
inline ExtractResult extract_text(const ArchiveEntry& entry, const IngestConfig& config) {
    ExtractResult result{Skip{}};
    const std::string& name = entry.filename();
    std::string ext = extension_lower(name);
    if (!is_supported_document(name)) {
        result.value = Skip{"unsupported_extension", ext};
        return result;
    }
    if (ext == ".doc" && config.external_doc_converter.empty()) {
        result.value = Skip{"unsupported_doc_no_converter", {}};
        return result;
    }

    MetaResolution res = resolve_meta(entry.dir_components(), entry.candidate_names(), config);
    result.wg_conflict = res.wg_conflict;
    if (!res.meta) {
        result.value = Skip{res.skip_reason, {}};
        return result;
    }

    RawDoc doc;
    doc.meta = std::move(*res.meta);
    doc.meta.source_path = entry.display();

    if (ext == ".docx") {
        try {
            doc.text = text::utf8_lossy(docx_text(entry.data));
        } catch (const XmlError& e) {
            result.value = Skip{"xml_parse_error", e.what()};
            return result;
        } catch (const zip::ZipError& e) {
            result.value = Skip{"docx_invalid", e.what()};
            return result;
        }
        doc.extraction_method = ExtractionMethod::DocxXml;
    } else if (ext == ".doc") {
        auto converted = detail::run_converter(config.external_doc_converter, entry.data);
        if (!converted) {
            result.value = Skip{"converter_failed", {}};
            return result;
        }
        if (text::looks_binary(*converted)) {
            result.value = Skip{"binary_content", {}};
            return result;
        }
        doc.text = text::utf8_lossy(*converted);
        doc.extraction_method = ExtractionMethod::ExternalConverter;
    } else {
        if (text::looks_binary(entry.data)) {
            result.value = Skip{"binary_content", {}};
            return result;
        }
        doc.text = text::utf8_lossy(entry.data);
        doc.extraction_method = (ext == ".txt") ? ExtractionMethod::PlainText : ExtractionMethod::Html;
    }

    doc.meta.doc_kind = classify_doc_kind(basename(name), std::string_view(doc.text).substr(0, kDocKindHeadChars), config);
    result.value = std::move(doc);
    return result;
}

}  // namespace tdoc::ingest
