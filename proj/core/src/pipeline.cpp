#include "citerec/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "citerec/errors.hpp"
#include "citerec/tokens.hpp"

namespace citerec {

using json = nlohmann::json;

namespace {

void reject_unknown_keys(const json& object, std::string_view where,
                         std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, value] : object.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigError("unknown config key \"" + key + "\" in " + std::string(where));
        }
    }
}

YearRange parse_year_range(const json& value, std::string_view key) {
    if (!value.is_array() || value.size() != 2) {
        throw ConfigError("config key \"" + std::string(key) +
                          "\" must be a [first, last] year pair");
    }
    return {value[0].get<int>(), value[1].get<int>()};
}

TrainConfig parse_train_config(const json& object, std::string_view where, TrainConfig base) {
    reject_unknown_keys(object, where,
                        {"dim", "window", "negatives", "epochs", "lr_start", "lr_end",
                         "subsample", "inout_weight"});
    base.dim = object.value("dim", base.dim);
    base.window = object.value("window", base.window);
    base.negatives = object.value("negatives", base.negatives);
    base.epochs = object.value("epochs", base.epochs);
    base.lr_start = object.value("lr_start", base.lr_start);
    base.lr_end = object.value("lr_end", base.lr_end);
    base.subsample = object.value("subsample", base.subsample);
    base.inout_weight = object.value("inout_weight", base.inout_weight);
    return base;
}

json train_config_json(const TrainConfig& c) {
    return {{"dim", c.dim},
            {"window", c.window},
            {"negatives", c.negatives},
            {"epochs", c.epochs},
            {"lr_start", c.lr_start},
            {"lr_end", c.lr_end},
            {"subsample", c.subsample},
            {"inout_weight", c.inout_weight}};
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write file: " + path.string());
    out << content;
    if (!out) throw ConfigError("failed writing file: " + path.string());
}

StopwordSet pipeline_stopwords(const PipelineConfig& config) {
    if (config.stopwords_path.empty()) return default_stopwords();
    return load_stopwords(config.stopwords_path);
}

}  // namespace

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config file not found: " + path.string());
    json parsed = json::parse(in, nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object()) {
        throw ConfigError("config file is not a JSON object: " + path.string());
    }
    reject_unknown_keys(parsed, "config",
                        {"corpus", "out_dir", "stopwords", "min_citations", "train_years",
                         "test_years", "seed", "cutoffs", "bm25", "hd2v", "doc2vec", "lda",
                         "lda_infer_sweeps", "fusion"});

    PipelineConfig config;
    if (parsed.contains("corpus")) config.corpus_path = parsed["corpus"].get<std::string>();
    if (parsed.contains("out_dir")) config.out_dir = parsed["out_dir"].get<std::string>();
    if (parsed.contains("stopwords")) {
        config.stopwords_path = parsed["stopwords"].get<std::string>();
    }
    config.min_citations = parsed.value("min_citations", config.min_citations);
    if (parsed.contains("train_years")) {
        config.train_years = parse_year_range(parsed["train_years"], "train_years");
    }
    if (parsed.contains("test_years")) {
        config.test_years = parse_year_range(parsed["test_years"], "test_years");
    }
    config.seed = parsed.value("seed", config.seed);
    if (parsed.contains("cutoffs")) {
        config.cutoffs = parsed["cutoffs"].get<std::vector<std::size_t>>();
        if (config.cutoffs.empty()) throw ConfigError("config key \"cutoffs\" must be non-empty");
        for (std::size_t k : config.cutoffs) {
            if (k == 0) throw ConfigError("evaluation cutoffs must be >= 1");
        }
    }
    if (parsed.contains("bm25")) {
        reject_unknown_keys(parsed["bm25"], "bm25", {"k1", "b"});
        config.bm25.k1 = parsed["bm25"].value("k1", config.bm25.k1);
        config.bm25.b = parsed["bm25"].value("b", config.bm25.b);
    }
    if (parsed.contains("hd2v")) {
        config.hd2v = parse_train_config(parsed["hd2v"], "hd2v", config.hd2v);
    }
    if (parsed.contains("doc2vec")) {
        config.doc2vec = parse_train_config(parsed["doc2vec"], "doc2vec", config.doc2vec);
    }
    if (parsed.contains("lda")) {
        reject_unknown_keys(parsed["lda"], "lda", {"num_topics", "alpha", "beta", "iterations"});
        const json& lda = parsed["lda"];
        config.lda.num_topics = lda.value("num_topics", config.lda.num_topics);
        config.lda.alpha = lda.value("alpha", config.lda.alpha);
        config.lda.beta = lda.value("beta", config.lda.beta);
        config.lda.iterations = lda.value("iterations", config.lda.iterations);
    }
    config.lda_infer_sweeps = parsed.value("lda_infer_sweeps", config.lda_infer_sweeps);
    if (parsed.contains("fusion")) {
        reject_unknown_keys(parsed["fusion"], "fusion", {"k", "n_draws", "weights"});
        const json& fusion = parsed["fusion"];
        config.fusion.k = fusion.value("k", config.fusion.k);
        config.fusion.n_draws = fusion.value("n_draws", config.fusion.n_draws);
        if (fusion.contains("weights")) {
            config.fusion.component_weights = fusion["weights"].get<std::vector<double>>();
        }
    }
    return config;
}

std::string pipeline_config_to_json(const PipelineConfig& config) {
    json file = {
        {"corpus", config.corpus_path.string()},
        {"out_dir", config.out_dir.string()},
        {"stopwords", config.stopwords_path.string()},
        {"min_citations", config.min_citations},
        {"train_years", {config.train_years.first, config.train_years.last}},
        {"test_years", {config.test_years.first, config.test_years.last}},
        {"seed", config.seed},
        {"cutoffs", config.cutoffs},
        {"bm25", {{"k1", config.bm25.k1}, {"b", config.bm25.b}}},
        {"hd2v", train_config_json(config.hd2v)},
        {"doc2vec", train_config_json(config.doc2vec)},
        {"lda",
         {{"num_topics", config.lda.num_topics},
          {"alpha", config.lda.alpha},
          {"beta", config.lda.beta},
          {"iterations", config.lda.iterations}}},
        {"lda_infer_sweeps", config.lda_infer_sweeps},
        {"fusion",
         {{"k", config.fusion.k},
          {"n_draws", config.fusion.n_draws},
          {"weights", config.fusion.component_weights}}},
    };
    return file.dump();
}

std::filesystem::path ArtifactPaths::model_file(ModelKind kind) const {
    switch (kind) {
        case ModelKind::bm25_citing: return models_dir() / "bm25_citing.json";
        case ModelKind::bm25_cited: return models_dir() / "bm25_cited.json";
        case ModelKind::hd2v_citing: return models_dir() / "hd2v_citing.emb";
        case ModelKind::hd2v_cited: return models_dir() / "hd2v_cited.emb";
        case ModelKind::doc2vec_citing: return models_dir() / "doc2vec_citing.emb";
        case ModelKind::lda_citing: return models_dir() / "lda_citing.json";
    }
    throw ConfigError("unhandled model kind");
}

std::filesystem::path ArtifactPaths::train_log(ModelKind kind) const {
    return models_dir() / (std::string(model_kind_name(kind)) + ".log.json");
}

std::filesystem::path ArtifactPaths::report(Algorithm a) const {
    return eval_dir() / ("report_" + std::string(algorithm_name(a)) + ".json");
}

PrepareSummary cmd_prepare(const PipelineConfig& config) {
    if (config.corpus_path.empty()) {
        throw ConfigError("no corpus path configured (set \"corpus\" or pass a config file)");
    }
    const StopwordSet stopwords = pipeline_stopwords(config);

    PrepareSummary summary;
    std::vector<Document> docs = load_corpus(config.corpus_path, summary.load);
    summary.documents_loaded = docs.size();

    docs = filter_min_citations(std::move(docs), config.min_citations);
    summary.documents_kept = docs.size();

    auto [train_docs, test_docs] =
        split_train_test(std::move(docs), config.train_years, config.test_years);
    summary.training_documents = train_docs.size();
    summary.test_documents = test_docs.size();

    const std::vector<TrainingDocument> citing = build_pseudo_fulltext(train_docs);
    const std::vector<TrainingDocument> cited = build_cited_pseudo_fulltext(train_docs);

    std::unordered_set<std::string> train_ids;
    train_ids.reserve(train_docs.size());
    for (const Document& doc : train_docs) train_ids.insert(doc.id);
    const std::vector<TestQuery> queries = extract_test_queries(test_docs, train_ids, stopwords);
    summary.test_queries = queries.size();

    const ArtifactPaths paths(config.out_dir);
    std::filesystem::create_directories(paths.root);
    save_training_corpus(paths.citing_corpus(), citing);
    save_training_corpus(paths.cited_corpus(), cited);
    save_test_queries(paths.test_queries(), queries);

    json manifest = {
        {"format", "citerec.manifest"},
        {"version", 1},
        {"config", json::parse(pipeline_config_to_json(config))},
        {"counts",
         {{"documents_loaded", summary.documents_loaded},
          {"documents_kept", summary.documents_kept},
          {"training_documents", summary.training_documents},
          {"test_documents", summary.test_documents},
          {"test_queries", summary.test_queries},
          {"malformed_lines", summary.load.malformed_lines},
          {"rejected_documents", summary.load.rejected_documents},
          {"dropped_contexts", summary.load.dropped_contexts},
          {"merged_contexts", summary.load.merged_contexts},
          {"dangling_references", summary.load.dangling_references}}},
        {"artifacts",
         {paths.citing_corpus().filename().string(), paths.cited_corpus().filename().string(),
          paths.test_queries().filename().string()}},
    };
    write_text_file(paths.manifest(), manifest.dump() + "\n");
    return summary;
}

TrainSummary cmd_train(const PipelineConfig& config, std::string_view algorithm,
                       Orientation orientation) {
    const ArtifactPaths paths(config.out_dir);
    const std::vector<TrainingDocument> docs =
        load_training_corpus(paths.training_corpus(orientation));
    std::filesystem::create_directories(paths.models_dir());

    TrainSummary summary;
    summary.algorithm = algorithm;
    summary.orientation = orientation;
    summary.documents = docs.size();

    ModelKind kind;
    json config_echo;
    if (algorithm == "bm25") {
        kind = orientation == Orientation::citing ? ModelKind::bm25_citing
                                                  : ModelKind::bm25_cited;
        const InvertedIndex index = InvertedIndex::build(docs);
        index.save(paths.model_file(kind));
        summary.vocabulary = index.term_count();
        config_echo = {{"k1", config.bm25.k1}, {"b", config.bm25.b}};
    } else if (algorithm == "hd2v") {
        kind = orientation == Orientation::citing ? ModelKind::hd2v_citing
                                                  : ModelKind::hd2v_cited;
        TrainConfig train = config.hd2v;
        train.rng_seed = config.seed + kSeedOffsetHd2v;
        const EmbeddingSpace space = train_hd2v(docs, train);
        save_embedding(paths.model_file(kind), space);
        summary.vocabulary = space.vocab.size();
        config_echo = train_config_json(train);
        config_echo["rng_seed"] = train.rng_seed;
    } else if (algorithm == "doc2vec") {
        if (orientation != Orientation::citing) {
            throw ConfigError("doc2vec is trained on the citing orientation only");
        }
        kind = ModelKind::doc2vec_citing;
        TrainConfig train = config.doc2vec;
        train.rng_seed = config.seed + kSeedOffsetDoc2vec;
        const EmbeddingSpace space = train_doc2vec(docs, train);
        save_embedding(paths.model_file(kind), space);
        summary.vocabulary = space.vocab.size();
        config_echo = train_config_json(train);
        config_echo["rng_seed"] = train.rng_seed;
    } else if (algorithm == "lda") {
        if (orientation != Orientation::citing) {
            throw ConfigError("lda is trained on the citing orientation only");
        }
        kind = ModelKind::lda_citing;
        LdaConfig train = config.lda;
        train.rng_seed = config.seed + kSeedOffsetLda;
        const LdaModel model = train_lda(docs, train);
        save_lda(paths.model_file(kind), model);
        summary.vocabulary = model.vocab.size();
        config_echo = {{"num_topics", train.num_topics},
                       {"alpha", model.alpha},
                       {"beta", model.beta},
                       {"iterations", train.iterations},
                       {"rng_seed", train.rng_seed}};
    } else {
        throw ConfigError("unknown trainable algorithm \"" + std::string(algorithm) +
                          "\" (expected bm25, hd2v, doc2vec, or lda)");
    }

    summary.model_path = paths.model_file(kind);
    json log = {{"algorithm", summary.algorithm},
                {"orientation", std::string(orientation_name(orientation))},
                {"seed", config.seed},
                {"documents", summary.documents},
                {"vocabulary", summary.vocabulary},
                {"config", std::move(config_echo)},
                {"model", summary.model_path.filename().string()}};
    write_text_file(paths.train_log(kind), log.dump() + "\n");
    return summary;
}

void load_required_models(const ArtifactPaths& paths, Algorithm algorithm, ModelSet& models) {
    for (ModelKind kind : required_models(algorithm)) {
        const std::filesystem::path file = paths.model_file(kind);
        switch (kind) {
            case ModelKind::bm25_citing:
                if (!models.bm25_citing) models.bm25_citing = InvertedIndex::load(file);
                break;
            case ModelKind::bm25_cited:
                if (!models.bm25_cited) models.bm25_cited = InvertedIndex::load(file);
                break;
            case ModelKind::hd2v_citing:
                if (!models.hd2v_citing) models.hd2v_citing = load_embedding(file);
                break;
            case ModelKind::hd2v_cited:
                if (!models.hd2v_cited) models.hd2v_cited = load_embedding(file);
                break;
            case ModelKind::doc2vec_citing:
                if (!models.doc2vec_citing) models.doc2vec_citing = load_embedding(file);
                break;
            case ModelKind::lda_citing:
                if (!models.lda_citing) models.lda_citing = load_lda(file);
                break;
        }
    }
}

RecommendOptions make_recommend_options(const PipelineConfig& config) {
    RecommendOptions options;
    options.k = config.fusion.k;
    options.bm25 = config.bm25;
    options.fusion = config.fusion;
    options.fusion.rng_seed = config.seed + kSeedOffsetFusion;
    options.lda_sweeps = config.lda_infer_sweeps;
    options.infer_seed = config.seed + kSeedOffsetInfer;
    return options;
}

RecommendResult cmd_recommend(const PipelineConfig& config, Algorithm algorithm,
                              const std::string& context_text, std::size_t k) {
    if (k == 0) throw ConfigError("recommendation depth k must be >= 1");
    const StopwordSet stopwords = pipeline_stopwords(config);
    TestQuery query;
    for (Token& token : remove_stopwords(tokenize(context_text), stopwords)) {
        if (!token.is_marker()) query.context_tokens.push_back(std::move(token));
    }

    const ArtifactPaths paths(config.out_dir);
    ModelSet models;
    load_required_models(paths, algorithm, models);
    const RecommendOptions options = make_recommend_options(config);

    RecommendResult result;
    result.algorithm = algorithm;
    if (is_fused(algorithm)) {
        result.fused = recommend_fused(algorithm, models, query, options);
        result.ranking = result.fused->ranked();
    } else {
        result.ranking = recommend_component(algorithm, models, query, options);
    }
    if (result.ranking.entries.size() > k) result.ranking.entries.resize(k);
    if (result.fused && result.fused->entries.size() > k) result.fused->entries.resize(k);
    return result;
}

std::vector<EvalReport> cmd_evaluate(const PipelineConfig& config,
                                     std::span<const Algorithm> algorithms) {
    if (algorithms.empty()) throw ConfigError("no algorithms selected for evaluation");
    if (config.cutoffs.empty()) throw ConfigError("no evaluation cutoffs configured");

    const ArtifactPaths paths(config.out_dir);
    const std::vector<TestQuery> queries = load_test_queries(paths.test_queries());

    ModelSet models;
    const RecommendOptions options = make_recommend_options(config);
    std::vector<EvalReport> reports;
    reports.reserve(algorithms.size());
    std::filesystem::create_directories(paths.eval_dir());
    for (Algorithm algorithm : algorithms) {
        load_required_models(paths, algorithm, models);
        auto recommend_fn = [&](const TestQuery& query) {
            return recommend(algorithm, models, query, options);
        };
        EvalReport report = run_evaluation(recommend_fn, queries, config.cutoffs,
                                           std::string(algorithm_name(algorithm)));
        write_text_file(paths.report(algorithm), eval_report_to_json(report) + "\n");
        reports.push_back(std::move(report));
    }

    const std::size_t max_cutoff =
        *std::max_element(config.cutoffs.begin(), config.cutoffs.end());
    write_text_file(paths.comparison_csv(), eval_comparison_csv(reports));
    write_text_file(paths.curves_csv(), eval_curve_csv(reports, max_cutoff));
    return reports;
}

}  // namespace citerec
