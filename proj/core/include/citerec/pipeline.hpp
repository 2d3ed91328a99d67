#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "citerec/bm25.hpp"
#include "citerec/corpus.hpp"
#include "citerec/embedding.hpp"
#include "citerec/fusion.hpp"
#include "citerec/lda.hpp"
#include "citerec/metrics.hpp"
#include "citerec/recommenders.hpp"

namespace citerec {

// One global seed fans out to per-component seeds (seed + offset) so each
// stage is independently reproducible.
inline constexpr std::uint64_t kSeedOffsetHd2v = 1;
inline constexpr std::uint64_t kSeedOffsetDoc2vec = 2;
inline constexpr std::uint64_t kSeedOffsetLda = 3;
inline constexpr std::uint64_t kSeedOffsetFusion = 4;
inline constexpr std::uint64_t kSeedOffsetInfer = 5;

struct PipelineConfig {
    std::filesystem::path corpus_path;
    std::filesystem::path out_dir = "out";
    std::filesystem::path stopwords_path;  // empty = built-in list
    std::size_t min_citations = 0;
    YearRange train_years{0, 2016};
    YearRange test_years{2017, 9999};
    std::uint64_t seed = 42;
    std::vector<std::size_t> cutoffs{5, 10};
    Bm25Params bm25;
    TrainConfig hd2v;
    TrainConfig doc2vec;
    LdaConfig lda;
    std::size_t lda_infer_sweeps = 20;
    FusionConfig fusion;  // fusion.k doubles as the component list depth
};

// JSON config file; every key optional, unknown keys rejected with the key
// name in the message. Seeds inside component configs are ignored in favor
// of the fanned-out global seed.
PipelineConfig load_pipeline_config(const std::filesystem::path& path);
std::string pipeline_config_to_json(const PipelineConfig& config);

// Fixed on-disk layout under the output directory.
struct ArtifactPaths {
    explicit ArtifactPaths(std::filesystem::path out_dir) : root(std::move(out_dir)) {}

    std::filesystem::path root;

    std::filesystem::path citing_corpus() const { return root / "citing_corpus.jsonl"; }
    std::filesystem::path cited_corpus() const { return root / "cited_corpus.jsonl"; }
    std::filesystem::path test_queries() const { return root / "test_queries.jsonl"; }
    std::filesystem::path manifest() const { return root / "manifest.json"; }
    std::filesystem::path models_dir() const { return root / "models"; }
    std::filesystem::path eval_dir() const { return root / "eval"; }
    std::filesystem::path model_file(ModelKind kind) const;
    std::filesystem::path train_log(ModelKind kind) const;
    std::filesystem::path report(Algorithm a) const;
    std::filesystem::path comparison_csv() const { return eval_dir() / "comparison.csv"; }
    std::filesystem::path curves_csv() const { return eval_dir() / "curves.csv"; }

    std::filesystem::path training_corpus(Orientation o) const {
        return o == Orientation::citing ? citing_corpus() : cited_corpus();
    }
};

struct PrepareSummary {
    LoadReport load;
    std::size_t documents_loaded = 0;    // parsed from the raw corpus
    std::size_t documents_kept = 0;      // after the min-citation filter
    std::size_t training_documents = 0;  // in the training year range
    std::size_t test_documents = 0;      // in the test year range
    std::size_t test_queries = 0;        // surviving extracted contexts
};

// Loads the raw corpus, applies the min-citation filter and year split,
// writes both training orientations, the test query file, and a manifest of
// counts. Artifacts are byte-deterministic (no timestamps).
PrepareSummary cmd_prepare(const PipelineConfig& config);

struct TrainSummary {
    std::string algorithm;  // bm25 | hd2v | doc2vec | lda
    Orientation orientation = Orientation::citing;
    std::filesystem::path model_path;
    std::size_t documents = 0;
    std::size_t vocabulary = 0;
};

// Trains one model on the prepared corpus of the given orientation, persists
// it plus a .log.json sidecar echoing the effective config and seed.
// doc2vec and lda accept only the citing orientation.
TrainSummary cmd_train(const PipelineConfig& config, std::string_view algorithm,
                       Orientation orientation);

struct RecommendResult {
    Algorithm algorithm = Algorithm::bm25;
    RankedList ranking;               // truncated to the requested k
    std::optional<FusedList> fused;   // draw counts, fused algorithms only
};

// Scores one free-text context against the trained models. k truncates the
// printed list only; component lists keep their configured depth.
RecommendResult cmd_recommend(const PipelineConfig& config, Algorithm algorithm,
                              const std::string& context_text, std::size_t k);

// Evaluates every algorithm over the prepared test queries and writes one
// JSON report per algorithm plus comparison and metric-vs-k CSVs.
std::vector<EvalReport> cmd_evaluate(const PipelineConfig& config,
                                     std::span<const Algorithm> algorithms);

// Loads the artifacts an algorithm needs into `models` (skipping ones already
// present). Missing files raise MissingArtifactError naming the path.
void load_required_models(const ArtifactPaths& paths, Algorithm algorithm, ModelSet& models);

RecommendOptions make_recommend_options(const PipelineConfig& config);

}  // namespace citerec
