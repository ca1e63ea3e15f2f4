#pragma once

#include <expat.h>

#include <string>
#include <string_view>

#include "tdoc/error.hpp"
#include "tdoc/ingest/zip.hpp"

namespace tdoc::ingest {

class XmlError : public Error {
public:
    using Error::Error;
};

namespace detail {

struct DocxState {
    std::string out;
    int text_depth = 0;
    int table_depth = 0;
};

inline std::string_view local_name(const XML_Char* name) {
    std::string_view n(name);
    auto colon = n.rfind(':');
    return colon == std::string_view::npos ? n : n.substr(colon + 1);
}

// Run text is re-escaped so that literal '<' and '&' in a document survive
// markup stripping as the characters they were.
inline void append_escaped(std::string& out, std::string_view s) {
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out.push_back(c);
        }
    }
}

inline void XMLCALL on_start(void* user, const XML_Char* name, const XML_Char**) {
    auto* st = static_cast<DocxState*>(user);
    std::string_view ln = local_name(name);
    if (ln == "t") {
        ++st->text_depth;
    } else if (ln == "tab") {
        st->out.push_back('\t');
    } else if (ln == "br" || ln == "cr") {
        st->out.push_back('\n');
    } else if (ln == "tbl") {
        if (st->table_depth++ == 0) st->out += "<table>";
    }
}

inline void XMLCALL on_end(void* user, const XML_Char* name) {
    auto* st = static_cast<DocxState*>(user);
    std::string_view ln = local_name(name);
    if (ln == "t") {
        --st->text_depth;
    } else if (ln == "p") {
        st->out.push_back('\n');
    } else if (ln == "tbl") {
        if (--st->table_depth == 0) st->out += "</table>\n";
    }
}

inline void XMLCALL on_text(void* user, const XML_Char* s, int len) {
    auto* st = static_cast<DocxState*>(user);
    if (st->text_depth > 0) append_escaped(st->out, std::string_view(s, static_cast<std::size_t>(len)));
}

}  // namespace detail

// Text of a WordprocessingML main document part: runs concatenated, one line
// per paragraph. Tables are wrapped in <table> markers so the cleaning stage
// removes them the same way it removes HTML tables.
inline std::string wordml_text(std::string_view xml) {
    XML_Parser parser = XML_ParserCreate(nullptr);
    if (!parser) throw XmlError("cannot create XML parser");
    detail::DocxState state;
    XML_SetUserData(parser, &state);
    XML_SetElementHandler(parser, detail::on_start, detail::on_end);
    XML_SetCharacterDataHandler(parser, detail::on_text);
    auto status = XML_Parse(parser, xml.data(), static_cast<int>(xml.size()), XML_TRUE);
    if (status != XML_STATUS_OK) {
        std::string msg = std::string("xml parse error at line ") +
                          std::to_string(XML_GetCurrentLineNumber(parser)) + ": " +
                          XML_ErrorString(XML_GetErrorCode(parser));
        XML_ParserFree(parser);
        throw XmlError(msg);
    }
    XML_ParserFree(parser);
    std::string& out = state.out;
    while (!out.empty() && out.back() == '\n') out.pop_back();
    return out;
}

// Headers and footers live in separate parts (word/header*.xml,
// word/footer*.xml) and are never read.
inline std::string docx_text(std::string docx_bytes) {
    zip::Reader pkg(std::move(docx_bytes));
    const zip::Member* main = pkg.find("word/document.xml");
    if (!main) throw zip::ZipError("docx package has no word/document.xml");
    return wordml_text(pkg.read(*main));
}

}  // namespace tdoc::ingest
