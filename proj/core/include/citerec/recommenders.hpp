#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "citerec/bm25.hpp"
#include "citerec/corpus.hpp"
#include "citerec/embedding.hpp"
#include "citerec/fusion.hpp"
#include "citerec/lda.hpp"
#include "citerec/ranked_list.hpp"

namespace citerec {

// Every scoring configuration the engine can answer a query with. Component
// algorithms produce a RankedList directly; the two hybrids fuse component
// lists.
enum class Algorithm {
    bm25,             // lexical, citing-orientation corpus
    bm25_cited,       // lexical, cited-orientation corpus
    lda,              // topic similarity, citing corpus
    doc2vec,          // paragraph vectors, inferred query vector
    hd2v_out,         // cos(q, d_O), citing corpus
    hd2v_out_cited,   // cos(q, d_O), cited corpus
    hd2v_in_out,      // weighted cos against d_O and d_I
    hybrid,           // fuse(bm25, hd2v_out)
    hybrid23,         // fuse(hd2v_out_cited, bm25_cited, bm25)
};

std::string_view algorithm_name(Algorithm a);
Algorithm parse_algorithm(std::string_view name);  // ConfigError on unknown names
std::span<const Algorithm> all_algorithms();
bool is_fused(Algorithm a);

// Trained artifacts an algorithm reads. Loaded lazily by the pipeline.
enum class ModelKind {
    bm25_citing,
    bm25_cited,
    hd2v_citing,
    hd2v_cited,
    doc2vec_citing,
    lda_citing,
};

std::string_view model_kind_name(ModelKind kind);
std::vector<ModelKind> required_models(Algorithm a);

// Whatever subset of the trained artifacts a command has loaded. Accessors
// throw MissingArtifactError naming the absent model.
struct ModelSet {
    std::optional<InvertedIndex> bm25_citing;
    std::optional<InvertedIndex> bm25_cited;
    std::optional<EmbeddingSpace> hd2v_citing;
    std::optional<EmbeddingSpace> hd2v_cited;
    std::optional<EmbeddingSpace> doc2vec_citing;
    std::optional<LdaModel> lda_citing;

    const InvertedIndex& require_bm25(Orientation o) const;
    const EmbeddingSpace& require_hd2v(Orientation o) const;
    const EmbeddingSpace& require_doc2vec() const;
    const LdaModel& require_lda() const;
};

struct RecommendOptions {
    std::size_t k = 500;  // component list depth
    Bm25Params bm25;
    FusionConfig fusion;
    std::size_t lda_sweeps = 20;      // query inference sweeps
    std::uint64_t infer_seed = 1;     // lda / doc2vec query inference
};

// Fusion of the two citing-orientation component lists (m=2).
FusedList hybrid12(const RankedList& bm25_list, const RankedList& hd2v_out_list,
                   const FusionConfig& config);

// Fusion of hd2vOUT and BM25 on the cited corpus plus BM25 on the citing
// corpus (m=3).
FusedList hybrid23(const RankedList& hd2v_out_cited, const RankedList& bm25_cited,
                   const RankedList& bm25_citing, const FusionConfig& config);

// Scores one query with a component algorithm. Throws ConfigError when given
// hybrid/hybrid23 (use recommend / recommend_fused).
RankedList recommend_component(Algorithm a, const ModelSet& models, const TestQuery& query,
                               const RecommendOptions& options);

// Runs a hybrid end to end: builds the component lists, fuses them.
FusedList recommend_fused(Algorithm a, const ModelSet& models, const TestQuery& query,
                          const RecommendOptions& options);

// Uniform entry point: fused algorithms are converted to their ranked view.
RankedList recommend(Algorithm a, const ModelSet& models, const TestQuery& query,
                     const RecommendOptions& options);

}  // namespace citerec
