#pragma once

#include <functional>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "citerec/corpus.hpp"
#include "citerec/ranked_list.hpp"

namespace citerec {

// All metrics use binary relevance and a rank cutoff K; values lie in [0, 1].

// AP@K = (sum of precision@r over relevant ranks r <= K) / min(|truth|, K),
// so a perfect top-K earns 1 even when |truth| > K. Throws on empty truth.
double average_precision(std::span<const std::string> ranked,
                         const std::set<std::string>& truth, std::size_t k);

// |top-K intersect truth| / |truth|.
double recall_at_k(std::span<const std::string> ranked, const std::set<std::string>& truth,
                   std::size_t k);

// 1/r for the first relevant rank r <= K, else 0.
double reciprocal_rank(std::span<const std::string> ranked, const std::set<std::string>& truth,
                       std::size_t k);

// DCG@K = rel(1)/1 + sum_{i>=2} rel(i)/log2(i); IDCG places min(|truth|, K)
// relevant items at the top; NDCG = DCG/IDCG.
double ndcg_at_k(std::span<const std::string> ranked, const std::set<std::string>& truth,
                 std::size_t k);

struct MetricValues {
    double average_precision = 0.0;
    double recall = 0.0;
    double reciprocal_rank = 0.0;
    double ndcg = 0.0;

    bool operator==(const MetricValues&) const = default;
};

MetricValues metrics_at(std::span<const std::string> ranked, const std::set<std::string>& truth,
                        std::size_t k);

struct QueryResult {
    std::size_t query_index = 0;
    std::vector<std::string> ranked;  // truncated at the largest cutoff
    std::set<std::string> ground_truth;
    std::map<std::size_t, MetricValues> at;  // cutoff -> values
};

struct EvalReport {
    std::string algorithm;
    std::size_t num_queries = 0;
    std::vector<std::size_t> cutoffs;
    std::map<std::size_t, MetricValues> aggregates;  // arithmetic means per cutoff
    std::vector<QueryResult> per_query;              // kept so aggregates are auditable
};

// Runs `recommend` over every query and averages each metric at each cutoff.
// Throws when queries or cutoffs are empty.
EvalReport run_evaluation(const std::function<RankedList(const TestQuery&)>& recommend,
                          std::span<const TestQuery> queries,
                          std::span<const std::size_t> cutoffs, const std::string& algorithm);

// Report wire forms. The JSON form includes per-query rows; the comparison
// CSV has header algorithm,cutoff,metric,value with one row per aggregate;
// the curve CSV has the same long format but recomputes the aggregates at
// every k in 1..max_k so metric-vs-k can be plotted directly.
std::string eval_report_to_json(const EvalReport& report);
std::string eval_comparison_csv(std::span<const EvalReport> reports);
std::string eval_curve_csv(std::span<const EvalReport> reports, std::size_t max_k);

}  // namespace citerec
