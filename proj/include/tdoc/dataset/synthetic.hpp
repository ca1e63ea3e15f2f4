#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "tdoc/error.hpp"
#include "tdoc/ingest/zip.hpp"
#include "tdoc/util/random.hpp"
#include "tdoc/working_group.hpp"

namespace tdoc::dataset {

// Probabilities are per document.
struct NoiseConfig {
    double url = 0.5;
    double html = 0.5;
    double table = 0.3;
    double references = 0.5;
    std::size_t header_repeats = 3;  // 0 disables the repeated meeting header
};

// Each content word is drawn from the shared vocabulary with probability
// alpha, else from the document's TSG vocabulary with probability
// tsg_overlap, else from its working group's core vocabulary.
struct SyntheticCorpusSpec {
    std::vector<WorkingGroup> wgs{kAllWorkingGroups.begin(), kAllWorkingGroups.end()};
    double alpha = 0.3;
    double tsg_overlap = 0.0;
    std::size_t core_vocab_size = 50;
    std::size_t shared_vocab_size = 200;
    std::size_t tsg_vocab_size = 50;
    // Explicit vocabularies; generated from the seed when empty.
    std::map<WorkingGroup, std::vector<std::string>> core_vocab;
    std::vector<std::string> shared_vocab;
    std::size_t docs_per_wg = 100;
    std::size_t words_per_doc = 400;
    std::vector<int> years{2015, 2016, 2017, 2018, 2019, 2020, 2021, 2022, 2023};
    std::uint64_t seed = 0;
    NoiseConfig noise;
    bool zip = false;
    double docx_fraction = 0.0;
    double html_fraction = 0.0;
    double change_request_fraction = 0.0;

    void check() const {
        if (wgs.empty()) throw ConfigError("synthetic corpus needs at least one working group");
        if (docs_per_wg < 1) throw ConfigError("docs_per_wg must be at least 1");
        if (years.empty()) throw ConfigError("synthetic corpus needs at least one year");
        for (double p : {alpha, tsg_overlap, docx_fraction, html_fraction, change_request_fraction})
            if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("synthetic corpus probabilities must be in [0, 1]");
        if (docx_fraction + html_fraction > 1.0) throw ConfigError("docx_fraction + html_fraction exceeds 1");
        for (int y : years)
            if (y < 2000 || y > 2099) throw ConfigError("synthetic years must be in 2000..2099");
    }
};

struct SyntheticVocab {
    std::map<WorkingGroup, std::vector<std::string>> core;
    std::map<Tsg, std::vector<std::string>> tsg;
    std::vector<std::string> shared;
};

namespace detail {

inline std::string pseudo_word(Rng& rng) {
    static constexpr std::string_view kConsonants = "bdfgklmnprstvz";
    static constexpr std::string_view kVowels = "aeiou";
    std::string w;
    std::size_t syllables = 2 + rng.index(3);
    for (std::size_t i = 0; i < syllables; ++i) {
        w.push_back(kConsonants[rng.index(kConsonants.size())]);
        w.push_back(kVowels[rng.index(kVowels.size())]);
    }
    return w;
}

inline std::vector<std::string> fresh_words(Rng& rng, std::size_t n, std::set<std::string>& used) {
    std::vector<std::string> out;
    while (out.size() < n) {
        std::string w = pseudo_word(rng);
        if (used.insert(w).second) out.push_back(std::move(w));
    }
    return out;
}

inline std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

inline std::string docx_package(const std::vector<std::string>& lines) {
    std::string xml =
        "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>\n"
        "<w:document xmlns:w=\"http://schemas.openxmlformats.org/wordprocessingml/2006/main\"><w:body>";
    for (const auto& line : lines) xml += "<w:p><w:r><w:t xml:space=\"preserve\">" + xml_escape(line) + "</w:t></w:r></w:p>";
    xml += "</w:body></w:document>";
    zip::Writer w;
    w.add("[Content_Types].xml",
          "<?xml version=\"1.0\"?><Types xmlns=\"http://schemas.openxmlformats.org/package/2006/content-types\"/>");
    w.add("word/document.xml", xml);
    return w.finish();
}

inline void write_bytes(const std::filesystem::path& p, const std::string& bytes) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw IngestError("cannot write synthetic file " + p.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IngestError("write failed for " + p.string());
}

}  // namespace detail

inline SyntheticVocab resolve_vocab(const SyntheticCorpusSpec& spec) {
    SyntheticVocab v;
    std::set<std::string> used;
    for (const auto& [_, words] : spec.core_vocab) used.insert(words.begin(), words.end());
    used.insert(spec.shared_vocab.begin(), spec.shared_vocab.end());

    Rng rng(derive_seed(spec.seed, 7));
    v.shared = spec.shared_vocab.empty() ? detail::fresh_words(rng, spec.shared_vocab_size, used) : spec.shared_vocab;
    for (Tsg t : {Tsg::RAN, Tsg::SA, Tsg::CT}) v.tsg[t] = detail::fresh_words(rng, spec.tsg_vocab_size, used);
    for (WorkingGroup wg : kAllWorkingGroups) {
        auto it = spec.core_vocab.find(wg);
        v.core[wg] = (it != spec.core_vocab.end() && !it->second.empty())
                         ? it->second
                         : detail::fresh_words(rng, spec.core_vocab_size, used);
    }
    return v;
}

struct SyntheticDoc {
    std::string tdoc_id;
    WorkingGroup wg = WorkingGroup::RAN1;
    int year = 0;
    std::vector<std::string> lines;
    std::string format;  // "txt", "html" or "docx"
};

// Document `index` of `wg`. Each document has its own random stream, so the
// text does not depend on which other documents are generated.
inline SyntheticDoc synthesize_document(const SyntheticCorpusSpec& spec, const SyntheticVocab& vocab, WorkingGroup wg,
                                        std::size_t index) {
    Rng rng(derive_seed(spec.seed, 1000 + label_index(wg) * 1000003 + index));
    SyntheticDoc doc;
    doc.wg = wg;
    doc.year = spec.years[index % spec.years.size()];
    char serial[16];
    std::snprintf(serial, sizeof serial, "%02d%05zu", doc.year % 100, index + 1);
    doc.tdoc_id = std::string(wg_tdoc_prefix(wg)) + "-" + serial;

    double f = rng.uniform();
    doc.format = (f < spec.docx_fraction) ? "docx" : (f < spec.docx_fraction + spec.html_fraction) ? "html" : "txt";

    const auto& core = vocab.core.at(wg);
    const auto& tsg = vocab.tsg.at(wg_tsg(wg));
    auto draw = [&]() -> const std::string& {
        if (!vocab.shared.empty() && rng.bernoulli(spec.alpha)) return vocab.shared[rng.index(vocab.shared.size())];
        if (!tsg.empty() && rng.bernoulli(spec.tsg_overlap)) return tsg[rng.index(tsg.size())];
        return core[rng.index(core.size())];
    };

    // Content paragraphs of 30-70 words.
    std::vector<std::string> paragraphs;
    for (std::size_t left = spec.words_per_doc; left > 0;) {
        std::size_t n = std::min<std::size_t>(left, 30 + rng.index(41));
        std::string p;
        for (std::size_t i = 0; i < n; ++i) {
            if (i > 0) p += (rng.index(12) == 0) ? ", " : " ";
            p += draw();
        }
        p += ".";
        paragraphs.push_back(std::move(p));
        left -= n;
    }

    const bool is_cr = rng.bernoulli(spec.change_request_fraction);
    const std::string header = "3GPP TSG Meeting #" + std::to_string(80 + rng.index(40)) + " Online";
    const bool url = rng.bernoulli(spec.noise.url);
    const bool html = rng.bernoulli(spec.noise.html);
    const bool table = rng.bernoulli(spec.noise.table);
    const bool refs = rng.bernoulli(spec.noise.references);
    const std::size_t header_every =
        spec.noise.header_repeats == 0 ? 0 : std::max<std::size_t>(1, (paragraphs.size() + spec.noise.header_repeats - 1) / spec.noise.header_repeats);

    if (is_cr) doc.lines.emplace_back("CHANGE REQUEST");
    std::size_t headers_written = 0;
    for (std::size_t i = 0; i < paragraphs.size(); ++i) {
        if (header_every && i % header_every == 0 && headers_written < spec.noise.header_repeats) {
            doc.lines.push_back(header);
            ++headers_written;
        }
        std::string p = paragraphs[i];
        if (url && i == 0) p += " https://www.3gpp.org/ftp/Meetings/TSG" + std::to_string(rng.index(100)) + ".zip?rev=1";
        if (html && i == paragraphs.size() / 2 && doc.format != "html") p = "<p><b>Proposal</b>: " + p + "</p>";
        doc.lines.push_back(std::move(p));
        if (table && i == 0) doc.lines.emplace_back("<table><tr><td>Parameter</td><td>Value 12</td></tr></table>");
    }
    // Every header line appears exactly header_repeats times so the
    // repeated-line rule recognizes it.
    while (headers_written < spec.noise.header_repeats) {
        doc.lines.push_back(header);
        ++headers_written;
    }
    if (refs) {
        doc.lines.emplace_back("References");
        doc.lines.emplace_back("[1] 3GPP TS 38.211, Physical channels and modulation.");
        doc.lines.emplace_back("[2] 3GPP TR 21.905, Vocabulary for 3GPP Specifications.");
    }
    return doc;
}

inline std::string render_document(const SyntheticDoc& doc) {
    if (doc.format == "docx") return detail::docx_package(doc.lines);
    std::string body;
    if (doc.format == "html") {
        body = "<html><body>\n";
        for (const auto& line : doc.lines) body += "<p>" + line + "</p>\n";
        body += "</body></html>\n";
    } else {
        for (const auto& line : doc.lines) body += line + "\n";
    }
    return body;
}

struct SyntheticSummary {
    std::size_t files_written = 0;
    std::map<WorkingGroup, std::size_t> docs_per_wg;
};

// Writes <out>/<WG>/<year>/<tdoc_id>.<ext>, or <tdoc_id>.zip wrapping that
// file when spec.zip is set. Years rotate through spec.years by document
// index. Output bytes depend only on the spec.
inline SyntheticSummary generate_synthetic_corpus(const SyntheticCorpusSpec& spec, const std::filesystem::path& out) {
    spec.check();
    std::error_code ec;
    std::filesystem::create_directories(out, ec);
    if (ec) throw IngestError("cannot create " + out.string() + ": " + ec.message());
    SyntheticVocab vocab = resolve_vocab(spec);
    for (WorkingGroup wg : spec.wgs)
        if (vocab.core.at(wg).empty()) throw ConfigError("empty core vocabulary for " + std::string(wg_name(wg)));

    SyntheticSummary summary;
    for (WorkingGroup wg : spec.wgs) {
        for (std::size_t i = 0; i < spec.docs_per_wg; ++i) {
            SyntheticDoc doc = synthesize_document(spec, vocab, wg, i);
            std::string name = doc.tdoc_id + "." + doc.format;
            std::string bytes = render_document(doc);
            auto dir = out / std::string(wg_name(wg)) / std::to_string(doc.year);
            if (spec.zip) {
                zip::Writer w;
                w.add(name, bytes);
                detail::write_bytes(dir / (doc.tdoc_id + ".zip"), w.finish());
            } else {
                detail::write_bytes(dir / name, bytes);
            }
            ++summary.files_written;
            ++summary.docs_per_wg[wg];
        }
    }
    return summary;
}

}  // namespace tdoc::dataset
