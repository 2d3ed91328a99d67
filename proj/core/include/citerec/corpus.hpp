#pragma once

#include <cstddef>
#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "citerec/tokens.hpp"

namespace citerec {

// One citation context of a paper. cited_ids is duplicate-free; duplicate
// (text, cited id) rows in the input are merged at load time.
struct CitationContext {
    std::string text;
    std::vector<std::string> cited_ids;

    bool operator==(const CitationContext&) const = default;
};

struct Document {
    std::string id;
    int year = 0;
    std::string title;
    std::string abstract;
    std::vector<CitationContext> contexts;

    bool operator==(const Document&) const = default;
};

// Per-file load diagnostics. Messages carry 1-based line numbers.
struct LoadReport {
    std::size_t documents_loaded = 0;
    std::size_t malformed_lines = 0;
    std::size_t rejected_documents = 0;
    std::size_t dropped_contexts = 0;   // contexts with an empty cited_ids list
    std::size_t merged_contexts = 0;    // duplicate (text, document) rows folded together
    std::size_t dangling_references = 0;  // cited ids not present in the loaded set
    std::vector<std::string> messages;
};

// Reads a corpus JSONL file ({"id","year","title","abstract","contexts"} per
// line). Malformed lines and documents missing id/year are reported and
// skipped; a duplicate document id is fatal.
std::vector<Document> load_corpus(const std::filesystem::path& path, LoadReport& report);

// Writes the same JSONL layout; load(save(docs)) == docs.
void save_corpus(const std::filesystem::path& path, std::span<const Document> docs);

enum class Orientation { citing, cited };

std::string_view orientation_name(Orientation o);
Orientation parse_orientation(std::string_view name);

// Pseudo-full-text document: word tokens with inline citation markers.
struct TrainingDocument {
    std::string id;
    Orientation orientation = Orientation::citing;
    std::vector<Token> tokens;

    bool operator==(const TrainingDocument&) const = default;
};

// Citing orientation: title ++ abstract ++ each of the document's own
// contexts with one marker per in-corpus cited id at the context midpoint
// (after floor(len/2) tokens; multi-cite markers in sorted id order).
std::vector<TrainingDocument> build_pseudo_fulltext(std::span<const Document> docs);

// Cited orientation: title ++ abstract ++ every context (from any document)
// that cites this document, ordered by (citing id, context index).
std::vector<TrainingDocument> build_cited_pseudo_fulltext(std::span<const Document> docs);

// Keeps documents whose in-corpus citation count, measured within the
// returned set, is >= min_citations. Peels iteratively so the result is
// self-consistent: filter(a) after filter(b) equals filter(max(a, b)).
std::vector<Document> filter_min_citations(std::vector<Document> docs, std::size_t min_citations);

// Inclusive calendar-year range.
struct YearRange {
    int first = 0;
    int last = 0;

    bool contains(int year) const { return year >= first && year <= last; }
    bool valid() const { return first <= last; }
    bool overlaps(const YearRange& other) const {
        return valid() && other.valid() && first <= other.last && other.first <= last;
    }
};

// Partitions by Document::year; documents outside both ranges are dropped.
// Invalid or overlapping ranges are fatal.
std::pair<std::vector<Document>, std::vector<Document>> split_train_test(
    std::vector<Document> docs, const YearRange& train_years, const YearRange& test_years);

struct TestQuery {
    std::vector<Token> context_tokens;  // markers and stop words removed
    std::set<std::string> ground_truth;
    int source_year = 0;

    bool operator==(const TestQuery&) const = default;
};

// One query per surviving context: ground truth intersected with train_ids,
// empty-truth queries dropped, duplicate contexts merged with unioned truth,
// queries shorter than 9 non-stopword tokens dropped.
std::vector<TestQuery> extract_test_queries(std::span<const Document> test_source,
                                            const std::unordered_set<std::string>& train_ids,
                                            const StopwordSet& stopwords);

// Training-corpus and test-query JSONL files. Token streams use the marker
// wire form; both round-trip exactly.
void save_training_corpus(const std::filesystem::path& path,
                          std::span<const TrainingDocument> docs);
std::vector<TrainingDocument> load_training_corpus(const std::filesystem::path& path);

void save_test_queries(const std::filesystem::path& path, std::span<const TestQuery> queries);
std::vector<TestQuery> load_test_queries(const std::filesystem::path& path);

}  // namespace citerec
