// Command-line front end: prepare / train / recommend / evaluate.
// Exit codes: 0 success, 1 internal error, 2 config or input error,
// 3 missing artifact.

#include <exception>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "citerec/errors.hpp"
#include "citerec/fusion.hpp"
#include "citerec/pipeline.hpp"
#include "citerec/recommenders.hpp"

namespace {

using namespace citerec;

struct CliState {
    std::string config_file;
    std::string corpus;
    std::string out_dir;
    std::uint64_t seed = 0;
    std::size_t min_citations = 0;
    std::vector<std::size_t> cutoffs;
    std::string algorithm;
    std::vector<std::string> algorithms;
    std::string orientation = "citing";
    std::size_t k = 10;
    std::string context_text;
    std::string context_file;
    bool as_json = false;

    // Options whose presence decides whether they override the config file.
    CLI::Option* corpus_opt = nullptr;
    CLI::Option* out_dir_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* min_citations_opt = nullptr;
    CLI::Option* cutoffs_opt = nullptr;
};

// Config file first, explicit flags on top.
PipelineConfig effective_config(const CliState& state) {
    PipelineConfig config;
    if (!state.config_file.empty()) config = load_pipeline_config(state.config_file);
    if (state.corpus_opt && state.corpus_opt->count()) config.corpus_path = state.corpus;
    if (state.out_dir_opt->count()) config.out_dir = state.out_dir;
    if (state.seed_opt->count()) config.seed = state.seed;
    if (state.min_citations_opt && state.min_citations_opt->count()) {
        config.min_citations = state.min_citations;
    }
    if (state.cutoffs_opt && state.cutoffs_opt->count()) config.cutoffs = state.cutoffs;
    return config;
}

void add_common_flags(CLI::App& cmd, CliState& state, bool with_corpus) {
    cmd.add_option("--config", state.config_file, "JSON config file");
    state.out_dir_opt = cmd.add_option("--out-dir", state.out_dir, "artifact directory");
    state.seed_opt = cmd.add_option("--seed", state.seed, "global random seed");
    if (with_corpus) {
        state.corpus_opt = cmd.add_option("--corpus", state.corpus, "raw corpus JSONL file");
    }
}

void run_prepare(const CliState& state) {
    const PipelineConfig config = effective_config(state);
    const PrepareSummary summary = cmd_prepare(config);
    std::cout << "prepared " << config.out_dir.string() << "\n"
              << "  documents loaded:      " << summary.documents_loaded << "\n"
              << "  after citation filter: " << summary.documents_kept << "\n"
              << "  training documents:    " << summary.training_documents << "\n"
              << "  test documents:        " << summary.test_documents << "\n"
              << "  test queries:          " << summary.test_queries << "\n";
    for (const std::string& message : summary.load.messages) {
        std::cerr << "warning: " << message << "\n";
    }
}

void run_train(const CliState& state) {
    const PipelineConfig config = effective_config(state);
    const Orientation orientation = parse_orientation(state.orientation);
    const TrainSummary summary = cmd_train(config, state.algorithm, orientation);
    std::cout << "trained " << summary.algorithm << " ("
              << orientation_name(summary.orientation) << "): " << summary.documents
              << " documents, " << summary.vocabulary << " terms -> "
              << summary.model_path.string() << "\n";
}

std::string load_context_text(const CliState& state) {
    if (!state.context_file.empty()) {
        std::ifstream in(state.context_file, std::ios::binary);
        if (!in) throw ConfigError("cannot read context file: " + state.context_file);
        std::ostringstream text;
        text << in.rdbuf();
        return text.str();
    }
    if (state.context_text.empty()) {
        throw ConfigError("no citation context given (pass text or --context-file)");
    }
    return state.context_text;
}

void run_recommend(const CliState& state) {
    const PipelineConfig config = effective_config(state);
    const Algorithm algorithm = parse_algorithm(state.algorithm);
    const RecommendResult result =
        cmd_recommend(config, algorithm, load_context_text(state), state.k);

    if (state.as_json) {
        std::cout << (result.fused ? fused_list_to_json(*result.fused)
                                   : ranked_list_to_json(result.ranking))
                  << "\n";
        return;
    }
    std::cout << "# algorithm: " << algorithm_name(algorithm) << "\n";
    if (result.fused) {
        std::cout << "rank\tcount\tp\tdoc\n";
        std::size_t rank = 0;
        for (const FusedEntry& entry : result.fused->entries) {
            std::cout << ++rank << '\t' << entry.count << '\t' << std::setprecision(6)
                      << entry.probability << '\t' << entry.id << "\n";
        }
    } else {
        std::cout << "rank\tscore\tdoc\n";
        std::size_t rank = 0;
        for (const ScoredDoc& entry : result.ranking.entries) {
            std::cout << ++rank << '\t' << std::setprecision(6) << entry.score << '\t'
                      << entry.id << "\n";
        }
    }
}

void run_evaluate(const CliState& state) {
    const PipelineConfig config = effective_config(state);
    std::vector<Algorithm> algorithms;
    for (const std::string& name : state.algorithms) {
        if (name == "all") {
            const auto everything = all_algorithms();
            algorithms.assign(everything.begin(), everything.end());
            break;
        }
        algorithms.push_back(parse_algorithm(name));
    }
    const std::vector<EvalReport> reports = cmd_evaluate(config, algorithms);

    std::cout << std::left << std::setw(16) << "algorithm" << std::setw(8) << "cutoff"
              << std::setw(10) << "map" << std::setw(10) << "recall" << std::setw(10) << "mrr"
              << std::setw(10) << "ndcg" << "\n";
    std::cout << std::fixed << std::setprecision(4);
    for (const EvalReport& report : reports) {
        for (const auto& [cutoff, values] : report.aggregates) {
            std::cout << std::left << std::setw(16) << report.algorithm << std::setw(8)
                      << cutoff << std::setw(10) << values.average_precision << std::setw(10)
                      << values.recall << std::setw(10) << values.reciprocal_rank
                      << std::setw(10) << values.ndcg << "\n";
        }
    }
    const ArtifactPaths paths(config.out_dir);
    std::cout << "reports under " << paths.eval_dir().string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Context-aware citation recommendation pipeline"};
    app.require_subcommand(1);

    CliState prepare_state;
    CLI::App* prepare = app.add_subcommand("prepare", "Build training corpora and test queries");
    add_common_flags(*prepare, prepare_state, /*with_corpus=*/true);
    prepare_state.min_citations_opt = prepare->add_option(
        "--min-citations", prepare_state.min_citations, "minimum in-corpus citation count");

    CliState train_state;
    CLI::App* train = app.add_subcommand("train", "Train one model on a prepared corpus");
    add_common_flags(*train, train_state, /*with_corpus=*/false);
    train->add_option("--algorithm", train_state.algorithm, "bm25 | hd2v | doc2vec | lda")
        ->required();
    train->add_option("--orientation", train_state.orientation, "citing | cited");

    CliState recommend_state;
    CLI::App* recommend = app.add_subcommand("recommend", "Rank papers for a citation context");
    add_common_flags(*recommend, recommend_state, /*with_corpus=*/false);
    recommend->add_option("--algorithm", recommend_state.algorithm,
                          "component or hybrid algorithm name")
        ->required();
    recommend->add_option("--k", recommend_state.k, "list length (default 10)");
    recommend->add_option("context", recommend_state.context_text, "citation context text");
    recommend->add_option("--context-file", recommend_state.context_file,
                          "read the context from a file");
    recommend->add_flag("--json", recommend_state.as_json, "emit JSON instead of a table");

    CliState evaluate_state;
    CLI::App* evaluate = app.add_subcommand("evaluate", "Score algorithms on the test queries");
    add_common_flags(*evaluate, evaluate_state, /*with_corpus=*/false);
    evaluate
        ->add_option("--algorithm", evaluate_state.algorithms,
                     "algorithm names (repeat or comma-separate; \"all\" for every one)")
        ->required()
        ->delimiter(',');
    evaluate_state.cutoffs_opt =
        evaluate->add_option("--cutoffs", evaluate_state.cutoffs, "metric cutoffs (default 5,10)")
            ->delimiter(',');

    try {
        app.parse(argc, argv);
        if (prepare->parsed()) run_prepare(prepare_state);
        if (train->parsed()) run_train(train_state);
        if (recommend->parsed()) run_recommend(recommend_state);
        if (evaluate->parsed()) run_evaluate(evaluate_state);
        return 0;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
        app.exit(e);
        return 2;
    } catch (const MissingArtifactError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
