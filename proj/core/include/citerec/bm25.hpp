#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "citerec/corpus.hpp"
#include "citerec/ranked_list.hpp"
#include "citerec/tokens.hpp"

namespace citerec {

// Okapi BM25 free parameters; k1 controls term-frequency saturation and b
// controls document-length normalization.
struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

// Immutable inverted index over training documents. Markers are indexed as
// ordinary terms (their text is the cited id); queries strip markers, so
// marker terms are never matched unless a query word collides with an id.
class InvertedIndex {
  public:
    struct Posting {
        std::uint32_t doc = 0;  // index into doc_ids()
        std::uint32_t tf = 0;

        bool operator==(const Posting&) const = default;
    };

    // Throws ConfigError on an empty corpus.
    static InvertedIndex build(std::span<const TrainingDocument> docs);

    std::size_t doc_count() const { return doc_ids_.size(); }
    double avg_doc_length() const { return avg_doc_length_; }
    const std::vector<std::string>& doc_ids() const { return doc_ids_; }
    std::size_t doc_length(const std::string& doc_id) const;
    std::size_t doc_frequency(const std::string& term) const;
    std::size_t term_count() const { return terms_.size(); }

    double idf(const std::string& term) const;

    // Okapi BM25 score of one document for a query. Duplicate query terms
    // contribute once per occurrence; markers in the query are ignored.
    // Throws ConfigError for an unknown doc id.
    double score(const Bm25Params& params, std::span<const Token> query,
                 const std::string& doc_id) const;

    // Top k by descending score, ties broken by ascending doc id; documents
    // with no matching term are absent.
    RankedList top_k(const Bm25Params& params, std::span<const Token> query, std::size_t k) const;

    void save(const std::filesystem::path& path) const;
    static InvertedIndex load(const std::filesystem::path& path);

    bool operator==(const InvertedIndex&) const = default;

  private:
    std::vector<std::string> doc_ids_;
    std::unordered_map<std::string, std::uint32_t> doc_index_;
    std::vector<std::uint32_t> doc_lengths_;
    double avg_doc_length_ = 0.0;

    std::vector<std::string> terms_;
    std::unordered_map<std::string, std::uint32_t> term_index_;
    std::vector<std::vector<Posting>> postings_;  // per term, ascending doc index

    void finalize();
};

}  // namespace citerec
