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

struct TrainConfig {
    std::size_t dim = 100;
    std::size_t window = 5;     // tokens each side
    std::size_t negatives = 5;  // negative samples per target
    std::size_t epochs = 5;
    double lr_start = 0.025;
    double lr_end = 0.0001;
    double subsample = 0.0;  // frequent-word subsampling threshold; 0 disables
    std::uint64_t rng_seed = 1;
    double inout_weight = 0.5;  // weight on the OUT cosine in INOUT scoring

    bool operator==(const TrainConfig&) const = default;
};

// Word vectors plus per-document IN (citing role) and OUT (cited role)
// vectors. All tables are row-major with `dim` columns.
class EmbeddingSpace {
  public:
    std::size_t dim = 0;
    TrainConfig config;

    std::vector<std::string> vocab;
    std::unordered_map<std::string, std::uint32_t> vocab_index;
    std::vector<std::uint64_t> word_freq;  // corpus occurrences

    std::vector<std::string> doc_ids;
    std::unordered_map<std::string, std::uint32_t> doc_index;
    std::vector<std::uint64_t> doc_freq;  // times cited by a marker

    std::vector<double> word_in;
    std::vector<double> word_out;
    std::vector<double> doc_in;   // d_I
    std::vector<double> doc_out;  // d_O

    std::span<const double> word_in_vec(std::uint32_t i) const { return row(word_in, i); }
    std::span<const double> word_out_vec(std::uint32_t i) const { return row(word_out, i); }
    std::span<const double> doc_in_vec(std::uint32_t i) const { return row(doc_in, i); }
    std::span<const double> doc_out_vec(std::uint32_t i) const { return row(doc_out, i); }

    bool finite() const;  // no NaN/Inf in any table

    bool operator==(const EmbeddingSpace&) const = default;

  private:
    std::span<const double> row(const std::vector<double>& table, std::uint32_t i) const {
        return {table.data() + static_cast<std::size_t>(i) * dim, dim};
    }
};

// Trains word vectors, d_I and d_O with two interleaved negative-sampling
// objectives: a content pass predicting each word from its document vector
// and window words, and a citation pass predicting each marker's d_O from
// the citing document vector and the words around the marker. Deterministic
// for a fixed seed (single-threaded). Throws ConfigError when the corpus has
// no markers.
EmbeddingSpace train_hd2v(std::span<const TrainingDocument> docs, const TrainConfig& config);

// Content pass only (paragraph vectors); d_O is left as a copy of d_I so the
// OUT-mode scorer works unchanged.
EmbeddingSpace train_doc2vec(std::span<const TrainingDocument> docs, const TrainConfig& config);

struct ContextVector {
    std::vector<double> values;
    bool all_oov = false;  // no query token found in the vocabulary
};

enum class QueryMode {
    mean_word_in,  // mean of word_in over in-vocab tokens (hd2v scoring)
    inferred_doc,  // fresh document vector fit with frozen parameters (doc2vec)
};

ContextVector infer_context_vector(const EmbeddingSpace& space, std::span<const Token> query,
                                   QueryMode mode, const TrainConfig& config);

enum class ScoreMode { out, in_out };

// mode=out: cos(q, d_O); mode=in_out: w*cos(q, d_O) + (1-w)*cos(q, d_I) with
// w = config.inout_weight. Zero/all-OOV query vectors yield an empty list.
RankedList score_hd2v(const EmbeddingSpace& space, const ContextVector& query, ScoreMode mode,
                      std::size_t k);

void save_embedding(const std::filesystem::path& path, const EmbeddingSpace& space);
EmbeddingSpace load_embedding(const std::filesystem::path& path);

namespace detail {

// Gradient workspace for one negative-sampling step; reusable across steps.
struct NsWorkspace {
    std::vector<double> h;
    std::vector<double> grad_h;
    std::vector<std::vector<double>> grad_inputs;
    std::vector<double> grad_target;
    std::vector<std::vector<double>> grad_negatives;
};

// Computes the loss L = -log s(u.h) - sum_j log s(-u_j.h) with
// h = mean(inputs) and fills the analytic gradients in ws. Inputs receive
// grad_h / m each.
double ns_compute(std::span<const double* const> inputs, const double* target,
                  std::span<const double* const> negatives, std::size_t dim, NsWorkspace& ws);

// One SGD step: computes gradients via ns_compute and applies
// param -= lr * grad to every participant. Returns the pre-step loss.
double ns_apply(std::span<double* const> inputs, double* target,
                std::span<double* const> negatives, std::size_t dim, double lr, NsWorkspace& ws);

}  // namespace detail

}  // namespace citerec
