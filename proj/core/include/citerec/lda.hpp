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

struct LdaConfig {
    std::size_t num_topics = 20;
    double alpha = 0.0;  // <= 0 picks the 50/num_topics default
    double beta = 0.01;
    std::size_t iterations = 200;  // full Gibbs sweeps
    std::uint64_t rng_seed = 1;

    double resolved_alpha() const {
        return alpha > 0.0 ? alpha : 50.0 / static_cast<double>(num_topics);
    }

    bool operator==(const LdaConfig&) const = default;
};

// Collapsed-Gibbs topic model. Count matrices are row-major: topic_word is
// T x V, doc_topic is D x T. Markers never enter the vocabulary; topics are
// purely lexical.
class LdaModel {
  public:
    std::size_t num_topics = 0;
    double alpha = 0.0;
    double beta = 0.0;

    std::vector<std::string> vocab;
    std::unordered_map<std::string, std::uint32_t> vocab_index;
    std::vector<std::string> doc_ids;
    std::unordered_map<std::string, std::uint32_t> doc_index;

    std::vector<std::uint64_t> topic_word;    // T x V
    std::vector<std::uint64_t> topic_totals;  // per-topic token count
    std::vector<std::uint64_t> doc_topic;     // D x T
    std::vector<std::uint64_t> doc_totals;    // per-document token count

    // Smoothed topic distribution of a training document:
    // (n_dt + alpha) / (n_d + T*alpha). Sums to 1 and is strictly positive.
    std::vector<double> doc_distribution(std::uint32_t doc) const;

    std::uint64_t total_tokens() const;

    bool operator==(const LdaModel&) const = default;
};

// Trains by collapsed Gibbs sampling: assignments start from a seeded uniform
// draw, then `config.iterations` full sweeps resample every token from
// p(t) proportional to (n_dt + alpha) * (n_tw + beta) / (n_t + V*beta) with
// the token's own assignment excluded. Deterministic for a fixed seed.
// iterations=0 returns the tallies of the initial assignment.
LdaModel train_lda(std::span<const TrainingDocument> docs, const LdaConfig& config);

struct TopicDistribution {
    std::vector<double> probs;  // length num_topics, sums to 1
    bool all_oov = false;       // no query token found in the vocabulary
};

// Gibbs sampling over the query tokens with topic_word frozen; the returned
// distribution averages the smoothed per-sweep estimates over the second half
// of the sweeps (variance reduction). All-OOV and empty queries yield the
// uniform distribution, flagged.
TopicDistribution infer_topics(const LdaModel& model, std::span<const Token> query,
                               std::size_t iterations, std::uint64_t seed);

// score(d) = cos(query distribution, smoothed distribution of d); top-k
// descending, ties broken by ascending doc id.
RankedList score_lda(const LdaModel& model, const TopicDistribution& query, std::size_t k);

void save_lda(const std::filesystem::path& path, const LdaModel& model);
LdaModel load_lda(const std::filesystem::path& path);

}  // namespace citerec
