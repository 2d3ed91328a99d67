#include "citerec/lda.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>

#include <nlohmann/json.hpp>

#include "citerec/errors.hpp"
#include "citerec/vecmath.hpp"

namespace citerec {

using json = nlohmann::json;

namespace {

// 53-bit uniform in [0, 1).
double u01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
}

std::size_t uniform_topic(std::mt19937_64& rng, std::size_t num_topics) {
    const auto t = static_cast<std::size_t>(u01(rng) * static_cast<double>(num_topics));
    return std::min(t, num_topics - 1);
}

// Draws an index from unnormalized weights by CDF inversion.
std::size_t draw_from_weights(std::mt19937_64& rng, std::span<const double> weights) {
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    double needle = u01(rng) * total;
    for (std::size_t t = 0; t + 1 < weights.size(); ++t) {
        needle -= weights[t];
        if (needle < 0.0) return t;
    }
    return weights.size() - 1;
}

}  // namespace

std::vector<double> LdaModel::doc_distribution(std::uint32_t doc) const {
    std::vector<double> dist(num_topics);
    const double denom =
        static_cast<double>(doc_totals[doc]) + static_cast<double>(num_topics) * alpha;
    for (std::size_t t = 0; t < num_topics; ++t) {
        dist[t] = (static_cast<double>(doc_topic[doc * num_topics + t]) + alpha) / denom;
    }
    return dist;
}

std::uint64_t LdaModel::total_tokens() const {
    return std::accumulate(topic_totals.begin(), topic_totals.end(), std::uint64_t{0});
}

LdaModel train_lda(std::span<const TrainingDocument> docs, const LdaConfig& config) {
    if (config.num_topics < 2) throw ConfigError("num_topics must be >= 2");
    if (docs.empty()) throw ConfigError("cannot train on an empty corpus");

    LdaModel model;
    model.num_topics = config.num_topics;
    model.alpha = config.resolved_alpha();
    model.beta = config.beta;

    // Token sequences with markers stripped; vocab in first-occurrence order.
    std::vector<std::vector<std::uint32_t>> words_by_doc;
    words_by_doc.reserve(docs.size());
    for (const TrainingDocument& doc : docs) {
        if (model.doc_index.count(doc.id)) {
            throw ConfigError("duplicate training document id \"" + doc.id + "\"");
        }
        model.doc_index.emplace(doc.id, static_cast<std::uint32_t>(model.doc_ids.size()));
        model.doc_ids.push_back(doc.id);
        std::vector<std::uint32_t> words;
        for (const Token& token : doc.tokens) {
            if (token.is_marker()) continue;
            auto [it, inserted] =
                model.vocab_index.emplace(token.text,
                                          static_cast<std::uint32_t>(model.vocab.size()));
            if (inserted) model.vocab.push_back(token.text);
            words.push_back(it->second);
        }
        words_by_doc.push_back(std::move(words));
    }

    const std::size_t T = model.num_topics;
    const std::size_t V = model.vocab.size();
    const std::size_t D = model.doc_ids.size();
    model.topic_word.assign(T * V, 0);
    model.topic_totals.assign(T, 0);
    model.doc_topic.assign(D * T, 0);
    model.doc_totals.assign(D, 0);

    std::mt19937_64 rng(config.rng_seed);
    std::vector<std::vector<std::uint32_t>> assignments(D);
    for (std::size_t d = 0; d < D; ++d) {
        assignments[d].reserve(words_by_doc[d].size());
        for (std::uint32_t w : words_by_doc[d]) {
            const auto t = static_cast<std::uint32_t>(uniform_topic(rng, T));
            assignments[d].push_back(t);
            ++model.topic_word[t * V + w];
            ++model.topic_totals[t];
            ++model.doc_topic[d * T + t];
            ++model.doc_totals[d];
        }
    }

    const double alpha = model.alpha;
    const double beta = model.beta;
    const double v_beta = static_cast<double>(V) * beta;
    std::vector<double> weights(T);
    for (std::size_t sweep = 0; sweep < config.iterations; ++sweep) {
        for (std::size_t d = 0; d < D; ++d) {
            for (std::size_t i = 0; i < words_by_doc[d].size(); ++i) {
                const std::uint32_t w = words_by_doc[d][i];
                const std::uint32_t old_t = assignments[d][i];
                --model.topic_word[old_t * V + w];
                --model.topic_totals[old_t];
                --model.doc_topic[d * T + old_t];

                for (std::size_t t = 0; t < T; ++t) {
                    weights[t] = (static_cast<double>(model.doc_topic[d * T + t]) + alpha) *
                                 (static_cast<double>(model.topic_word[t * V + w]) + beta) /
                                 (static_cast<double>(model.topic_totals[t]) + v_beta);
                }
                const auto new_t = static_cast<std::uint32_t>(draw_from_weights(rng, weights));
                assignments[d][i] = new_t;
                ++model.topic_word[new_t * V + w];
                ++model.topic_totals[new_t];
                ++model.doc_topic[d * T + new_t];
            }
        }
    }
    return model;
}

TopicDistribution infer_topics(const LdaModel& model, std::span<const Token> query,
                               std::size_t iterations, std::uint64_t seed) {
    const std::size_t T = model.num_topics;
    TopicDistribution result;
    result.probs.assign(T, 1.0 / static_cast<double>(T));

    std::vector<std::uint32_t> words;
    for (const Token& token : query) {
        if (token.is_marker()) continue;
        if (auto it = model.vocab_index.find(token.text); it != model.vocab_index.end()) {
            words.push_back(it->second);
        }
    }
    if (words.empty()) {
        result.all_oov = true;
        return result;
    }

    const std::size_t V = model.vocab.size();
    const double alpha = model.alpha;
    const double beta = model.beta;
    const double v_beta = static_cast<double>(V) * beta;

    std::mt19937_64 rng(seed);
    std::vector<std::uint32_t> assignments;
    std::vector<std::uint64_t> query_topic(T, 0);
    assignments.reserve(words.size());
    for (std::size_t i = 0; i < words.size(); ++i) {
        const auto t = static_cast<std::uint32_t>(uniform_topic(rng, T));
        assignments.push_back(t);
        ++query_topic[t];
    }

    const double denom =
        static_cast<double>(words.size()) + static_cast<double>(T) * alpha;
    std::vector<double> accumulated(T, 0.0);
    std::size_t averaged = 0;
    auto accumulate_estimate = [&] {
        for (std::size_t t = 0; t < T; ++t) {
            accumulated[t] += (static_cast<double>(query_topic[t]) + alpha) / denom;
        }
        ++averaged;
    };

    // Global topic_word counts stay frozen; only the query's own topic tallies
    // move. The second half of the sweeps feeds the averaged estimate.
    const std::size_t first_averaged = iterations - iterations / 2;
    std::vector<double> weights(T);
    for (std::size_t sweep = 0; sweep < iterations; ++sweep) {
        for (std::size_t i = 0; i < words.size(); ++i) {
            const std::uint32_t w = words[i];
            const std::uint32_t old_t = assignments[i];
            --query_topic[old_t];
            for (std::size_t t = 0; t < T; ++t) {
                weights[t] = (static_cast<double>(query_topic[t]) + alpha) *
                             (static_cast<double>(model.topic_word[t * V + w]) + beta) /
                             (static_cast<double>(model.topic_totals[t]) + v_beta);
            }
            const auto new_t = static_cast<std::uint32_t>(draw_from_weights(rng, weights));
            assignments[i] = new_t;
            ++query_topic[new_t];
        }
        if (sweep >= first_averaged) accumulate_estimate();
    }
    if (averaged == 0) accumulate_estimate();  // iterations 0/1: use the last state

    for (std::size_t t = 0; t < T; ++t) {
        result.probs[t] = accumulated[t] / static_cast<double>(averaged);
    }
    return result;
}

RankedList score_lda(const LdaModel& model, const TopicDistribution& query, std::size_t k) {
    RankedList result;
    result.source = "lda";
    std::vector<std::pair<std::uint32_t, double>> scored;
    scored.reserve(model.doc_ids.size());
    for (std::uint32_t d = 0; d < model.doc_ids.size(); ++d) {
        scored.push_back({d, cosine(query.probs, model.doc_distribution(d))});
    }
    std::sort(scored.begin(), scored.end(), [&](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return model.doc_ids[a.first] < model.doc_ids[b.first];
    });
    if (scored.size() > k) scored.resize(k);
    result.entries.reserve(scored.size());
    for (const auto& [doc, score] : scored) {
        result.entries.push_back({model.doc_ids[doc], score});
    }
    return result;
}

void save_lda(const std::filesystem::path& path, const LdaModel& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write model file: " + path.string());

    const std::size_t T = model.num_topics;
    const std::size_t V = model.vocab.size();
    json topic_word = json::array();
    for (std::size_t t = 0; t < T; ++t) {
        json row = json::array();
        for (std::size_t w = 0; w < V; ++w) row.push_back(model.topic_word[t * V + w]);
        topic_word.push_back(std::move(row));
    }
    json docs = json::array();
    for (std::size_t d = 0; d < model.doc_ids.size(); ++d) {
        json row = json::array();
        for (std::size_t t = 0; t < T; ++t) row.push_back(model.doc_topic[d * T + t]);
        docs.push_back({{"id", model.doc_ids[d]}, {"topics", std::move(row)}});
    }
    json file = {{"format", "citerec.lda"},
                 {"version", 1},
                 {"num_topics", T},
                 {"alpha", model.alpha},
                 {"beta", model.beta},
                 {"vocab", model.vocab},
                 {"docs", std::move(docs)},
                 {"topic_word", std::move(topic_word)}};
    out << file.dump() << '\n';
}

LdaModel load_lda(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingArtifactError("model file not found: " + path.string());
    json file = json::parse(in, nullptr, false);
    if (file.is_discarded() || file.value("format", "") != "citerec.lda") {
        throw ConfigError("not an lda model file: " + path.string());
    }
    LdaModel model;
    model.num_topics = file["num_topics"].get<std::size_t>();
    model.alpha = file["alpha"].get<double>();
    model.beta = file["beta"].get<double>();
    model.vocab = file["vocab"].get<std::vector<std::string>>();
    for (std::size_t w = 0; w < model.vocab.size(); ++w) {
        model.vocab_index.emplace(model.vocab[w], static_cast<std::uint32_t>(w));
    }

    const std::size_t T = model.num_topics;
    const std::size_t V = model.vocab.size();
    model.topic_word.reserve(T * V);
    for (const json& row : file["topic_word"]) {
        for (const json& count : row) model.topic_word.push_back(count.get<std::uint64_t>());
    }
    if (model.topic_word.size() != T * V) {
        throw ConfigError("lda model has inconsistent topic_word shape: " + path.string());
    }
    for (const json& doc : file["docs"]) {
        model.doc_index.emplace(doc["id"].get<std::string>(),
                                static_cast<std::uint32_t>(model.doc_ids.size()));
        model.doc_ids.push_back(doc["id"].get<std::string>());
        for (const json& count : doc["topics"]) {
            model.doc_topic.push_back(count.get<std::uint64_t>());
        }
    }
    if (model.doc_topic.size() != model.doc_ids.size() * T) {
        throw ConfigError("lda model has inconsistent doc_topic shape: " + path.string());
    }

    model.topic_totals.assign(T, 0);
    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t w = 0; w < V; ++w) model.topic_totals[t] += model.topic_word[t * V + w];
    }
    model.doc_totals.assign(model.doc_ids.size(), 0);
    for (std::size_t d = 0; d < model.doc_ids.size(); ++d) {
        for (std::size_t t = 0; t < T; ++t) model.doc_totals[d] += model.doc_topic[d * T + t];
    }
    return model;
}

}  // namespace citerec
