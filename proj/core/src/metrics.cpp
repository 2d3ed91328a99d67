#include "citerec/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "citerec/errors.hpp"

namespace citerec {

using json = nlohmann::json;

namespace {

std::size_t effective_depth(std::size_t ranked_size, std::size_t k) {
    return std::min(ranked_size, k);
}

}  // namespace

double average_precision(std::span<const std::string> ranked,
                         const std::set<std::string>& truth, std::size_t k) {
    if (truth.empty()) throw ConfigError("average precision needs a non-empty truth set");
    const std::size_t depth = effective_depth(ranked.size(), k);
    std::size_t hits = 0;
    double sum = 0.0;
    for (std::size_t r = 1; r <= depth; ++r) {
        if (truth.count(ranked[r - 1])) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(r);
        }
    }
    const std::size_t normalizer = std::min(truth.size(), k);
    return sum / static_cast<double>(normalizer);
}

double recall_at_k(std::span<const std::string> ranked, const std::set<std::string>& truth,
                   std::size_t k) {
    if (truth.empty()) throw ConfigError("recall needs a non-empty truth set");
    const std::size_t depth = effective_depth(ranked.size(), k);
    std::size_t hits = 0;
    for (std::size_t r = 0; r < depth; ++r) {
        if (truth.count(ranked[r])) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(truth.size());
}

double reciprocal_rank(std::span<const std::string> ranked, const std::set<std::string>& truth,
                       std::size_t k) {
    if (truth.empty()) throw ConfigError("reciprocal rank needs a non-empty truth set");
    const std::size_t depth = effective_depth(ranked.size(), k);
    for (std::size_t r = 1; r <= depth; ++r) {
        if (truth.count(ranked[r - 1])) return 1.0 / static_cast<double>(r);
    }
    return 0.0;
}

double ndcg_at_k(std::span<const std::string> ranked, const std::set<std::string>& truth,
                 std::size_t k) {
    if (truth.empty()) throw ConfigError("ndcg needs a non-empty truth set");
    auto gain = [](std::size_t rank) {  // 1-based; log2(2) is also 1
        return rank == 1 ? 1.0 : 1.0 / std::log2(static_cast<double>(rank));
    };
    const std::size_t depth = effective_depth(ranked.size(), k);
    double dcg = 0.0;
    for (std::size_t r = 1; r <= depth; ++r) {
        if (truth.count(ranked[r - 1])) dcg += gain(r);
    }
    double idcg = 0.0;
    const std::size_t ideal_hits = std::min(truth.size(), k);
    for (std::size_t r = 1; r <= ideal_hits; ++r) idcg += gain(r);
    return dcg / idcg;
}

MetricValues metrics_at(std::span<const std::string> ranked, const std::set<std::string>& truth,
                        std::size_t k) {
    return {average_precision(ranked, truth, k), recall_at_k(ranked, truth, k),
            reciprocal_rank(ranked, truth, k), ndcg_at_k(ranked, truth, k)};
}

EvalReport run_evaluation(const std::function<RankedList(const TestQuery&)>& recommend,
                          std::span<const TestQuery> queries,
                          std::span<const std::size_t> cutoffs, const std::string& algorithm) {
    if (queries.empty()) throw ConfigError("no test queries to evaluate");
    if (cutoffs.empty()) throw ConfigError("no evaluation cutoffs given");

    EvalReport report;
    report.algorithm = algorithm;
    report.num_queries = queries.size();
    report.cutoffs.assign(cutoffs.begin(), cutoffs.end());
    std::sort(report.cutoffs.begin(), report.cutoffs.end());
    report.cutoffs.erase(std::unique(report.cutoffs.begin(), report.cutoffs.end()),
                         report.cutoffs.end());
    const std::size_t max_cutoff = report.cutoffs.back();

    report.per_query.reserve(queries.size());
    for (std::size_t qi = 0; qi < queries.size(); ++qi) {
        const TestQuery& query = queries[qi];
        const RankedList ranking = recommend(query);

        QueryResult result;
        result.query_index = qi;
        result.ground_truth = query.ground_truth;
        result.ranked.reserve(std::min(ranking.entries.size(), max_cutoff));
        for (const ScoredDoc& entry : ranking.entries) {
            if (result.ranked.size() >= max_cutoff) break;
            result.ranked.push_back(entry.id);
        }
        for (std::size_t k : report.cutoffs) {
            result.at.emplace(k, metrics_at(result.ranked, result.ground_truth, k));
        }
        report.per_query.push_back(std::move(result));
    }

    for (std::size_t k : report.cutoffs) {
        MetricValues mean;
        for (const QueryResult& result : report.per_query) {
            const MetricValues& v = result.at.at(k);
            mean.average_precision += v.average_precision;
            mean.recall += v.recall;
            mean.reciprocal_rank += v.reciprocal_rank;
            mean.ndcg += v.ndcg;
        }
        const auto n = static_cast<double>(report.num_queries);
        mean.average_precision /= n;
        mean.recall /= n;
        mean.reciprocal_rank /= n;
        mean.ndcg /= n;
        report.aggregates.emplace(k, mean);
    }
    return report;
}

namespace {

json metric_values_json(const MetricValues& v) {
    return {{"map", v.average_precision},
            {"recall", v.recall},
            {"mrr", v.reciprocal_rank},
            {"ndcg", v.ndcg}};
}

}  // namespace

std::string eval_report_to_json(const EvalReport& report) {
    json aggregates = json::object();
    for (const auto& [k, values] : report.aggregates) {
        aggregates[std::to_string(k)] = metric_values_json(values);
    }
    json per_query = json::array();
    for (const QueryResult& result : report.per_query) {
        json at = json::object();
        for (const auto& [k, values] : result.at) {
            at[std::to_string(k)] = metric_values_json(values);
        }
        per_query.push_back({{"query", result.query_index},
                             {"ranked", result.ranked},
                             {"truth", result.ground_truth},
                             {"at", std::move(at)}});
    }
    return json{{"algorithm", report.algorithm},
                {"num_queries", report.num_queries},
                {"cutoffs", report.cutoffs},
                {"aggregates", std::move(aggregates)},
                {"per_query", std::move(per_query)}}
        .dump();
}

namespace {

void append_metric_rows(std::ostringstream& out, const std::string& algorithm, std::size_t k,
                        const MetricValues& v) {
    out << algorithm << ',' << k << ",map," << v.average_precision << '\n';
    out << algorithm << ',' << k << ",recall," << v.recall << '\n';
    out << algorithm << ',' << k << ",mrr," << v.reciprocal_rank << '\n';
    out << algorithm << ',' << k << ",ndcg," << v.ndcg << '\n';
}

std::ostringstream csv_stream() {
    std::ostringstream out;
    out.imbue(std::locale::classic());
    out.precision(10);
    return out;
}

}  // namespace

std::string eval_comparison_csv(std::span<const EvalReport> reports) {
    std::ostringstream out = csv_stream();
    out << "algorithm,cutoff,metric,value\n";
    for (const EvalReport& report : reports) {
        for (const auto& [k, values] : report.aggregates) {
            append_metric_rows(out, report.algorithm, k, values);
        }
    }
    return out.str();
}

std::string eval_curve_csv(std::span<const EvalReport> reports, std::size_t max_k) {
    std::ostringstream out = csv_stream();
    out << "algorithm,k,metric,value\n";
    for (const EvalReport& report : reports) {
        for (std::size_t k = 1; k <= max_k; ++k) {
            MetricValues mean;
            for (const QueryResult& result : report.per_query) {
                const MetricValues v = metrics_at(result.ranked, result.ground_truth, k);
                mean.average_precision += v.average_precision;
                mean.recall += v.recall;
                mean.reciprocal_rank += v.reciprocal_rank;
                mean.ndcg += v.ndcg;
            }
            const auto n = static_cast<double>(report.per_query.size());
            mean.average_precision /= n;
            mean.recall /= n;
            mean.reciprocal_rank /= n;
            mean.ndcg /= n;
            append_metric_rows(out, report.algorithm, k, mean);
        }
    }
    return out.str();
}

}  // namespace citerec
