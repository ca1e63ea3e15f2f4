#pragma once

#include <string>
#include <vector>

#include "tdoc/error.hpp"
#include "tdoc/preprocess/clean.hpp"
#include "tdoc/preprocess/words.hpp"
#include "tdoc/working_group.hpp"

namespace tdoc::preprocess {

struct Segment {
    std::string doc_id;
    std::size_t seg_index = 0;
    std::string text;
    std::size_t word_count = 0;
    WorkingGroup label = WorkingGroup::RAN1;
    int year = 0;
};

struct SegmentationResult {
    std::vector<Segment> segments;
    std::size_t discarded_tail_words = 0;
};

// Consecutive chunks of max_words words; each segment's text is the original
// character span from its first word to its last. A final chunk shorter than
// both max_words and min_tail_words is discarded.
inline SegmentationResult segment_document(const CleanDoc& doc, std::size_t max_words, std::size_t min_tail_words) {
    if (doc.dropped) throw InvalidInput("cannot segment dropped document " + doc.meta.tdoc_id);
    if (max_words < 1) throw InvalidInput("max_words must be at least 1");
    SegmentationResult result;
    auto spans = word_spans(doc.text);
    for (std::size_t start = 0; start < spans.size(); start += max_words) {
        std::size_t end = std::min(start + max_words, spans.size());
        std::size_t n = end - start;
        if (n < max_words && n < min_tail_words) {
            result.discarded_tail_words = n;
            break;
        }
        Segment seg;
        seg.doc_id = doc.meta.tdoc_id;
        seg.seg_index = result.segments.size();
        seg.text = doc.text.substr(spans[start].begin, spans[end - 1].end - spans[start].begin);
        seg.word_count = n;
        seg.label = doc.meta.wg;
        seg.year = doc.meta.year;
        result.segments.push_back(std::move(seg));
    }
    return result;
}

inline std::vector<Segment> segment(const CleanDoc& doc, std::size_t max_words, std::size_t min_tail_words = 20) {
    return segment_document(doc, max_words, min_tail_words).segments;
}

}  // namespace tdoc::preprocess
