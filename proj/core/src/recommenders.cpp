#include "citerec/recommenders.hpp"

#include <array>

#include "citerec/errors.hpp"

namespace citerec {

std::string_view algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::bm25: return "bm25";
        case Algorithm::bm25_cited: return "bm25-cited";
        case Algorithm::lda: return "lda";
        case Algorithm::doc2vec: return "doc2vec";
        case Algorithm::hd2v_out: return "hd2vout";
        case Algorithm::hd2v_out_cited: return "hd2vout-cited";
        case Algorithm::hd2v_in_out: return "hd2vinout";
        case Algorithm::hybrid: return "hybrid";
        case Algorithm::hybrid23: return "hybrid23";
    }
    throw ConfigError("unhandled algorithm value");
}

std::span<const Algorithm> all_algorithms() {
    static constexpr std::array algorithms = {
        Algorithm::bm25,     Algorithm::bm25_cited,     Algorithm::lda,
        Algorithm::doc2vec,  Algorithm::hd2v_out,       Algorithm::hd2v_out_cited,
        Algorithm::hd2v_in_out, Algorithm::hybrid,      Algorithm::hybrid23,
    };
    return algorithms;
}

Algorithm parse_algorithm(std::string_view name) {
    for (Algorithm a : all_algorithms()) {
        if (algorithm_name(a) == name) return a;
    }
    throw ConfigError("unknown algorithm \"" + std::string(name) +
                      "\" (expected bm25, bm25-cited, lda, doc2vec, hd2vout, hd2vout-cited, "
                      "hd2vinout, hybrid, or hybrid23)");
}

bool is_fused(Algorithm a) { return a == Algorithm::hybrid || a == Algorithm::hybrid23; }

std::string_view model_kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::bm25_citing: return "bm25_citing";
        case ModelKind::bm25_cited: return "bm25_cited";
        case ModelKind::hd2v_citing: return "hd2v_citing";
        case ModelKind::hd2v_cited: return "hd2v_cited";
        case ModelKind::doc2vec_citing: return "doc2vec_citing";
        case ModelKind::lda_citing: return "lda_citing";
    }
    throw ConfigError("unhandled model kind");
}

std::vector<ModelKind> required_models(Algorithm a) {
    switch (a) {
        case Algorithm::bm25: return {ModelKind::bm25_citing};
        case Algorithm::bm25_cited: return {ModelKind::bm25_cited};
        case Algorithm::lda: return {ModelKind::lda_citing};
        case Algorithm::doc2vec: return {ModelKind::doc2vec_citing};
        case Algorithm::hd2v_out: return {ModelKind::hd2v_citing};
        case Algorithm::hd2v_out_cited: return {ModelKind::hd2v_cited};
        case Algorithm::hd2v_in_out: return {ModelKind::hd2v_citing};
        case Algorithm::hybrid: return {ModelKind::bm25_citing, ModelKind::hd2v_citing};
        case Algorithm::hybrid23:
            return {ModelKind::hd2v_cited, ModelKind::bm25_cited, ModelKind::bm25_citing};
    }
    throw ConfigError("unhandled algorithm value");
}

namespace {

[[noreturn]] void missing_model(ModelKind kind) {
    throw MissingArtifactError("model \"" + std::string(model_kind_name(kind)) +
                               "\" has not been trained");
}

}  // namespace

const InvertedIndex& ModelSet::require_bm25(Orientation o) const {
    const auto& model = o == Orientation::citing ? bm25_citing : bm25_cited;
    if (!model) {
        missing_model(o == Orientation::citing ? ModelKind::bm25_citing
                                               : ModelKind::bm25_cited);
    }
    return *model;
}

const EmbeddingSpace& ModelSet::require_hd2v(Orientation o) const {
    const auto& model = o == Orientation::citing ? hd2v_citing : hd2v_cited;
    if (!model) {
        missing_model(o == Orientation::citing ? ModelKind::hd2v_citing
                                               : ModelKind::hd2v_cited);
    }
    return *model;
}

const EmbeddingSpace& ModelSet::require_doc2vec() const {
    if (!doc2vec_citing) missing_model(ModelKind::doc2vec_citing);
    return *doc2vec_citing;
}

const LdaModel& ModelSet::require_lda() const {
    if (!lda_citing) missing_model(ModelKind::lda_citing);
    return *lda_citing;
}

FusedList hybrid12(const RankedList& bm25_list, const RankedList& hd2v_out_list,
                   const FusionConfig& config) {
    const std::array lists = {bm25_list, hd2v_out_list};
    FusedList fused = fuse(lists, config);
    fused.source = "hybrid";
    return fused;
}

FusedList hybrid23(const RankedList& hd2v_out_cited, const RankedList& bm25_cited,
                   const RankedList& bm25_citing, const FusionConfig& config) {
    const std::array lists = {hd2v_out_cited, bm25_cited, bm25_citing};
    FusedList fused = fuse(lists, config);
    fused.source = "hybrid23";
    return fused;
}

namespace {

RankedList bm25_ranking(const ModelSet& models, Orientation o, const TestQuery& query,
                        const RecommendOptions& options) {
    RankedList list =
        models.require_bm25(o).top_k(options.bm25, query.context_tokens, options.k);
    list.source = algorithm_name(o == Orientation::citing ? Algorithm::bm25
                                                          : Algorithm::bm25_cited);
    return list;
}

RankedList hd2v_ranking(const ModelSet& models, Orientation o, ScoreMode mode,
                        const TestQuery& query, const RecommendOptions& options) {
    const EmbeddingSpace& space = models.require_hd2v(o);
    const ContextVector vec =
        infer_context_vector(space, query.context_tokens, QueryMode::mean_word_in, space.config);
    RankedList list = score_hd2v(space, vec, mode, options.k);
    if (mode == ScoreMode::in_out) {
        list.source = algorithm_name(Algorithm::hd2v_in_out);
    } else {
        list.source = algorithm_name(o == Orientation::citing ? Algorithm::hd2v_out
                                                              : Algorithm::hd2v_out_cited);
    }
    return list;
}

}  // namespace

RankedList recommend_component(Algorithm a, const ModelSet& models, const TestQuery& query,
                               const RecommendOptions& options) {
    switch (a) {
        case Algorithm::bm25:
            return bm25_ranking(models, Orientation::citing, query, options);
        case Algorithm::bm25_cited:
            return bm25_ranking(models, Orientation::cited, query, options);
        case Algorithm::lda: {
            const LdaModel& model = models.require_lda();
            const TopicDistribution dist =
                infer_topics(model, query.context_tokens, options.lda_sweeps,
                             options.infer_seed);
            return score_lda(model, dist, options.k);
        }
        case Algorithm::doc2vec: {
            const EmbeddingSpace& space = models.require_doc2vec();
            TrainConfig infer_config = space.config;
            infer_config.rng_seed = options.infer_seed;
            const ContextVector vec = infer_context_vector(
                space, query.context_tokens, QueryMode::inferred_doc, infer_config);
            RankedList list = score_hd2v(space, vec, ScoreMode::out, options.k);
            list.source = algorithm_name(Algorithm::doc2vec);
            return list;
        }
        case Algorithm::hd2v_out:
            return hd2v_ranking(models, Orientation::citing, ScoreMode::out, query, options);
        case Algorithm::hd2v_out_cited:
            return hd2v_ranking(models, Orientation::cited, ScoreMode::out, query, options);
        case Algorithm::hd2v_in_out:
            return hd2v_ranking(models, Orientation::citing, ScoreMode::in_out, query, options);
        case Algorithm::hybrid:
        case Algorithm::hybrid23:
            throw ConfigError("fused algorithms have no single component ranking");
    }
    throw ConfigError("unhandled algorithm value");
}

FusedList recommend_fused(Algorithm a, const ModelSet& models, const TestQuery& query,
                          const RecommendOptions& options) {
    if (a == Algorithm::hybrid) {
        return hybrid12(recommend_component(Algorithm::bm25, models, query, options),
                        recommend_component(Algorithm::hd2v_out, models, query, options),
                        options.fusion);
    }
    if (a == Algorithm::hybrid23) {
        return hybrid23(recommend_component(Algorithm::hd2v_out_cited, models, query, options),
                        recommend_component(Algorithm::bm25_cited, models, query, options),
                        recommend_component(Algorithm::bm25, models, query, options),
                        options.fusion);
    }
    throw ConfigError("algorithm \"" + std::string(algorithm_name(a)) + "\" is not a fusion");
}

RankedList recommend(Algorithm a, const ModelSet& models, const TestQuery& query,
                     const RecommendOptions& options) {
    if (is_fused(a)) {
        RankedList list = recommend_fused(a, models, query, options).ranked();
        return list;
    }
    return recommend_component(a, models, query, options);
}

}  // namespace citerec
