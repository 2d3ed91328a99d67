#include "citerec/fusion.hpp"

#include <algorithm>
#include <random>

#include <nlohmann/json.hpp>

#include "citerec/errors.hpp"

namespace citerec {

using json = nlohmann::json;

namespace {

// 53-bit uniform in [0, 1).
double u01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
}

}  // namespace

RankedList FusedList::ranked() const {
    RankedList list;
    list.source = source;
    list.entries.reserve(entries.size());
    const double denom = n_draws > 0 ? static_cast<double>(n_draws) : 1.0;
    for (const FusedEntry& entry : entries) {
        list.entries.push_back({entry.id, static_cast<double>(entry.count) / denom});
    }
    return list;
}

std::map<std::string, std::vector<double>> fitness_scores(std::span<const RankedList> lists,
                                                          std::span<const double> weights) {
    if (!weights.empty() && weights.size() != lists.size()) {
        throw ConfigError("component weight count does not match component list count");
    }
    std::map<std::string, std::vector<double>> fitness;
    for (std::size_t i = 0; i < lists.size(); ++i) {
        const double weight = weights.empty() ? 1.0 : weights[i];
        std::size_t rank = 0;
        for (const ScoredDoc& entry : lists[i].entries) {
            ++rank;
            fitness[entry.id].push_back(weight / static_cast<double>(rank));
        }
    }
    return fitness;
}

std::map<std::string, double> to_probabilities(
    const std::map<std::string, std::vector<double>>& fitness) {
    if (fitness.empty()) throw ConfigError("cannot normalize an empty fitness map");
    double total = 0.0;
    std::map<std::string, double> sums;
    for (const auto& [id, scores] : fitness) {
        double sum = 0.0;
        for (double s : scores) sum += s;
        sums.emplace(id, sum);
        total += sum;
    }
    for (auto& [id, sum] : sums) sum /= total;
    return sums;
}

FusedList fuse(std::span<const RankedList> lists, const FusionConfig& config) {
    if (config.k < 1) throw ConfigError("fusion k must be >= 1");
    if (config.n_draws < 1) throw ConfigError("fusion draw count must be >= 1");

    std::vector<RankedList> truncated(lists.begin(), lists.end());
    for (RankedList& list : truncated) {
        if (list.entries.size() > config.k) list.entries.resize(config.k);
    }

    FusedList fused;
    fused.source = "fusion";
    fused.n_draws = config.n_draws;

    const auto fitness = fitness_scores(truncated, config.component_weights);
    if (fitness.empty()) return fused;  // every component list empty
    const auto probabilities = to_probabilities(fitness);

    // Map iteration is id-sorted, making the CDF layout deterministic.
    std::vector<const std::string*> ids;
    std::vector<double> cdf;
    ids.reserve(probabilities.size());
    cdf.reserve(probabilities.size());
    double running = 0.0;
    for (const auto& [id, p] : probabilities) {
        ids.push_back(&id);
        running += p;
        cdf.push_back(running);
    }
    const double total = running;

    std::vector<std::uint64_t> counts(ids.size(), 0);
    std::mt19937_64 rng(config.rng_seed);
    for (std::size_t draw = 0; draw < config.n_draws; ++draw) {
        const double needle = u01(rng) * total;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), needle);
        if (it == cdf.end()) --it;
        ++counts[static_cast<std::size_t>(it - cdf.begin())];
    }

    fused.entries.reserve(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        fused.entries.push_back({*ids[i], counts[i], probabilities.at(*ids[i])});
    }
    std::sort(fused.entries.begin(), fused.entries.end(),
              [](const FusedEntry& a, const FusedEntry& b) {
                  if (a.count != b.count) return a.count > b.count;
                  if (a.probability != b.probability) return a.probability > b.probability;
                  return a.id < b.id;
              });
    if (fused.entries.size() > config.k) fused.entries.resize(config.k);
    return fused;
}

std::string ranked_list_to_json(const RankedList& list) {
    json entries = json::array();
    for (const ScoredDoc& entry : list.entries) entries.push_back({entry.id, entry.score});
    return json{{"source", list.source}, {"entries", std::move(entries)}}.dump();
}

RankedList ranked_list_from_json(const std::string& text) {
    json parsed = json::parse(text, nullptr, false);
    if (parsed.is_discarded() || !parsed.contains("entries")) {
        throw ConfigError("malformed ranked-list JSON");
    }
    RankedList list;
    list.source = parsed.value("source", "");
    for (const json& entry : parsed["entries"]) {
        list.entries.push_back({entry[0].get<std::string>(), entry[1].get<double>()});
    }
    return list;
}

std::string fused_list_to_json(const FusedList& list) {
    json entries = json::array();
    for (const FusedEntry& entry : list.entries) {
        entries.push_back({{"id", entry.id}, {"count", entry.count}, {"p", entry.probability}});
    }
    return json{{"source", list.source},
                {"n_draws", list.n_draws},
                {"entries", std::move(entries)}}
        .dump();
}

FusedList fused_list_from_json(const std::string& text) {
    json parsed = json::parse(text, nullptr, false);
    if (parsed.is_discarded() || !parsed.contains("entries")) {
        throw ConfigError("malformed fused-list JSON");
    }
    FusedList list;
    list.source = parsed.value("source", "");
    list.n_draws = parsed.value("n_draws", std::uint64_t{0});
    for (const json& entry : parsed["entries"]) {
        list.entries.push_back({entry["id"].get<std::string>(),
                                entry["count"].get<std::uint64_t>(),
                                entry["p"].get<double>()});
    }
    return list;
}

}  // namespace citerec
