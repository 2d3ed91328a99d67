#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "citerec/ranked_list.hpp"

namespace citerec {

struct FusionConfig {
    std::size_t k = 500;               // per-component depth and output truncation
    std::size_t n_draws = 1'000'000;   // samples drawn with replacement
    std::uint64_t rng_seed = 1;
    std::vector<double> component_weights;  // empty = all 1.0; else one per list

    bool operator==(const FusionConfig&) const = default;
};

struct FusedEntry {
    std::string id;
    std::uint64_t count = 0;   // times drawn
    double probability = 0.0;  // sampling probability p(d), kept for audit

    bool operator==(const FusedEntry&) const = default;
};

// Result of one fusion run. Counts sum to exactly n_draws; entries sorted by
// descending count, ties by descending probability, then ascending doc id.
struct FusedList {
    std::string source;
    std::uint64_t n_draws = 0;
    std::vector<FusedEntry> entries;

    bool empty() const { return entries.empty(); }
    std::size_t size() const { return entries.size(); }

    // Order-preserving view with score = empirical draw frequency.
    RankedList ranked() const;

    bool operator==(const FusedList&) const = default;
};

// Reciprocal-rank fitness: the entry at (1-based) rank r of each list scores
// weight/r. A doc appearing in several lists keeps every score. Weights must
// be empty (all 1.0) or match the number of lists.
std::map<std::string, std::vector<double>> fitness_scores(std::span<const RankedList> lists,
                                                          std::span<const double> weights = {});

// p(d) = sum of d's fitness scores / sum over all docs. Throws on an empty map.
std::map<std::string, double> to_probabilities(
    const std::map<std::string, std::vector<double>>& fitness);

// Truncates each list to config.k, converts reciprocal-rank fitness to
// probabilities, draws config.n_draws samples with replacement (seeded
// generator, sequential cumulative-distribution inversion over id-sorted
// docs), counts, sorts, truncates to config.k. All lists empty yields an
// empty FusedList.
FusedList fuse(std::span<const RankedList> lists, const FusionConfig& config);

// JSON wire forms: {"source": str, "entries": [[id, score], ...]} for ranked
// lists; fused lists add per-entry draw counts and probabilities for audit.
std::string ranked_list_to_json(const RankedList& list);
RankedList ranked_list_from_json(const std::string& text);
std::string fused_list_to_json(const FusedList& list);
FusedList fused_list_from_json(const std::string& text);

}  // namespace citerec
