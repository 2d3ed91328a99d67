#pragma once

// Seeded corpus generators for the planted-pattern retrieval suites. Every
// generator emits raw Documents so tests exercise the real preparation path
// (filtering, splitting, pseudo-full-text assembly, query extraction).

#include <cstdint>
#include <string>
#include <vector>

#include "citerec/corpus.hpp"

namespace citerec::testsupport {

struct SyntheticCorpus {
    std::vector<Document> documents;
    YearRange train_years{2000, 2016};
    YearRange test_years{2017, 2020};
};

// 200 documents in 5 disjoint lexical clusters with within-cluster citations.
// Each training document owns signature words that appear in its abstract and
// in every context citing it, so lexical and citation-based retrieval can
// both recover the ground truth.
SyntheticCorpus clustered_corpus(std::uint64_t seed);

// Complementary-strengths corpus. Half the cited targets are only lexically
// distinctive: their signature words live in their own abstract and never
// co-occur with their citation markers. The other half are only
// citation-distinctive: their signature words appear in every sibling
// abstract (lexically useless) but pair with exactly one target's markers in
// training contexts. Test queries cite one kind each.
SyntheticCorpus complementary_corpus(std::uint64_t seed);

// Every citation context is written in the cited document's private
// vocabulary, so in-link text describes a paper far better than the paper's
// own outgoing contexts do.
SyntheticCorpus cited_vocabulary_corpus(std::uint64_t seed);

// Small three-theme corpus with citations in both year ranges; fast enough
// for end-to-end pipeline tests.
SyntheticCorpus small_corpus(std::uint64_t seed);

// Convenience builders for hand-made token sequences.
std::vector<Token> word_tokens(std::initializer_list<std::string_view> texts);
TrainingDocument training_doc(std::string id, std::initializer_list<std::string_view> texts,
                              Orientation orientation = Orientation::citing);

}  // namespace citerec::testsupport
