#include "citerec/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include "binio.hpp"
#include "citerec/errors.hpp"
#include "citerec/vecmath.hpp"

namespace citerec {

namespace detail {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// -log sigmoid(x), numerically stable for large |x|.
double neg_log_sigmoid(double x) {
    if (x >= 0.0) return std::log1p(std::exp(-x));
    return -x + std::log1p(std::exp(x));
}

}  // namespace

double ns_compute(std::span<const double* const> inputs, const double* target,
                  std::span<const double* const> negatives, std::size_t dim, NsWorkspace& ws) {
    const double inv_m = 1.0 / static_cast<double>(inputs.size());
    ws.h.assign(dim, 0.0);
    for (const double* input : inputs) {
        for (std::size_t d = 0; d < dim; ++d) ws.h[d] += input[d];
    }
    for (std::size_t d = 0; d < dim; ++d) ws.h[d] *= inv_m;

    ws.grad_h.assign(dim, 0.0);
    ws.grad_target.assign(dim, 0.0);
    ws.grad_negatives.resize(negatives.size());

    const double pos_dot = dot({ws.h.data(), dim}, {target, dim});
    double loss = neg_log_sigmoid(pos_dot);
    const double pos_err = sigmoid(pos_dot) - 1.0;  // dL/d(u.h)
    for (std::size_t d = 0; d < dim; ++d) {
        ws.grad_target[d] = pos_err * ws.h[d];
        ws.grad_h[d] = pos_err * target[d];
    }

    for (std::size_t j = 0; j < negatives.size(); ++j) {
        const double* neg = negatives[j];
        const double neg_dot = dot({ws.h.data(), dim}, {neg, dim});
        loss += neg_log_sigmoid(-neg_dot);
        const double neg_err = sigmoid(neg_dot);  // dL/d(u_j.h)
        auto& grad = ws.grad_negatives[j];
        grad.assign(dim, 0.0);
        for (std::size_t d = 0; d < dim; ++d) {
            grad[d] = neg_err * ws.h[d];
            ws.grad_h[d] += neg_err * neg[d];
        }
    }

    ws.grad_inputs.resize(inputs.size());
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        auto& grad = ws.grad_inputs[i];
        grad.assign(dim, 0.0);
        for (std::size_t d = 0; d < dim; ++d) grad[d] = ws.grad_h[d] * inv_m;
    }
    return loss;
}

double ns_apply(std::span<double* const> inputs, double* target,
                std::span<double* const> negatives, std::size_t dim, double lr, NsWorkspace& ws) {
    std::vector<const double*> cinputs(inputs.begin(), inputs.end());
    std::vector<const double*> cnegatives(negatives.begin(), negatives.end());
    const double loss = ns_compute(cinputs, target, cnegatives, dim, ws);
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        double* input = inputs[i];
        for (std::size_t d = 0; d < dim; ++d) input[d] -= lr * ws.grad_inputs[i][d];
    }
    for (std::size_t d = 0; d < dim; ++d) target[d] -= lr * ws.grad_target[d];
    for (std::size_t j = 0; j < negatives.size(); ++j) {
        double* neg = negatives[j];
        for (std::size_t d = 0; d < dim; ++d) neg[d] -= lr * ws.grad_negatives[j][d];
    }
    return loss;
}

}  // namespace detail

namespace {

// 53-bit uniform in [0, 1).
double u01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
}

// Cumulative-distribution sampler over weights^(3/4).
class SamplingTable {
  public:
    explicit SamplingTable(std::span<const std::uint64_t> weights) {
        cdf_.reserve(weights.size());
        double total = 0.0;
        for (std::uint64_t w : weights) {
            total += std::pow(static_cast<double>(w), 0.75);
            cdf_.push_back(total);
        }
        total_ = total;
    }

    bool usable() const { return total_ > 0.0; }

    std::uint32_t sample(std::mt19937_64& rng) const {
        const double needle = u01(rng) * total_;
        auto it = std::upper_bound(cdf_.begin(), cdf_.end(), needle);
        if (it == cdf_.end()) --it;
        return static_cast<std::uint32_t>(it - cdf_.begin());
    }

  private:
    std::vector<double> cdf_;
    double total_ = 0.0;
};

void validate_config(const TrainConfig& config) {
    if (config.dim < 2) throw ConfigError("embedding dim must be >= 2");
    if (config.window < 1) throw ConfigError("window must be >= 1");
    if (config.negatives < 1) throw ConfigError("negatives must be >= 1");
    if (config.inout_weight < 0.0 || config.inout_weight > 1.0) {
        throw ConfigError("inout_weight must lie in [0, 1]");
    }
}

EmbeddingSpace init_space(std::span<const TrainingDocument> docs, const TrainConfig& config) {
    EmbeddingSpace space;
    space.dim = config.dim;
    space.config = config;

    for (const TrainingDocument& doc : docs) {
        if (space.doc_index.count(doc.id)) {
            throw ConfigError("duplicate training document id \"" + doc.id + "\"");
        }
        space.doc_index.emplace(doc.id, static_cast<std::uint32_t>(space.doc_ids.size()));
        space.doc_ids.push_back(doc.id);
        for (const Token& token : doc.tokens) {
            if (token.is_marker()) continue;
            auto [it, inserted] =
                space.vocab_index.emplace(token.text,
                                          static_cast<std::uint32_t>(space.vocab.size()));
            if (inserted) {
                space.vocab.push_back(token.text);
                space.word_freq.push_back(0);
            }
            ++space.word_freq[it->second];
        }
    }
    space.doc_freq.assign(space.doc_ids.size(), 0);
    for (const TrainingDocument& doc : docs) {
        for (const Token& token : doc.tokens) {
            if (!token.is_marker()) continue;
            if (auto it = space.doc_index.find(token.text); it != space.doc_index.end()) {
                ++space.doc_freq[it->second];
            }
        }
    }

    const std::size_t dim = config.dim;
    std::mt19937_64 rng(config.rng_seed);
    const double scale = 1.0 / static_cast<double>(dim);
    space.word_in.resize(space.vocab.size() * dim);
    for (double& v : space.word_in) v = (u01(rng) - 0.5) * scale;
    space.doc_in.resize(space.doc_ids.size() * dim);
    for (double& v : space.doc_in) v = (u01(rng) - 0.5) * scale;
    space.word_out.assign(space.vocab.size() * dim, 0.0);
    space.doc_out.assign(space.doc_ids.size() * dim, 0.0);
    return space;
}

// Linear start->end schedule over all scan positions of all epochs.
double learning_rate(const TrainConfig& config, std::uint64_t position, std::uint64_t total) {
    if (total == 0) return config.lr_start;
    const double progress = static_cast<double>(position) / static_cast<double>(total);
    return std::max(config.lr_end,
                    config.lr_start - (config.lr_start - config.lr_end) * progress);
}

struct KeptToken {
    std::uint32_t index;     // vocab index for words, doc index for markers
    std::uint64_t position;  // original position for the LR schedule
    bool marker;
};

void train_space(EmbeddingSpace& space, std::span<const TrainingDocument> docs,
                 const TrainConfig& config, bool citation_pass) {
    const std::size_t dim = space.dim;
    std::mt19937_64 rng(config.rng_seed + 1);  // init consumed the base seed stream

    const SamplingTable word_table(space.word_freq);
    const SamplingTable doc_table(space.doc_freq);
    if (citation_pass && !doc_table.usable()) {
        throw ConfigError("corpus contains no citation markers; cannot train document vectors");
    }

    std::uint64_t total_words = 0;
    for (std::uint64_t f : space.word_freq) total_words += f;
    std::uint64_t tokens_per_epoch = 0;
    for (const TrainingDocument& doc : docs) tokens_per_epoch += doc.tokens.size();
    const std::uint64_t total_positions = tokens_per_epoch * config.epochs;

    detail::NsWorkspace ws;
    std::vector<KeptToken> kept;
    std::vector<double*> inputs;
    std::vector<double*> negatives;

    std::uint64_t scanned = 0;
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        for (const TrainingDocument& doc : docs) {
            const std::uint32_t doc_idx = space.doc_index.at(doc.id);
            double* const d_in = space.doc_in.data() + static_cast<std::size_t>(doc_idx) * dim;

            kept.clear();
            for (const Token& token : doc.tokens) {
                const std::uint64_t position = scanned++;
                if (token.is_marker()) {
                    auto it = space.doc_index.find(token.text);
                    if (it == space.doc_index.end()) continue;  // untrainable target
                    kept.push_back({it->second, position, true});
                    continue;
                }
                const std::uint32_t word = space.vocab_index.at(token.text);
                if (config.subsample > 0.0 && total_words > 0) {
                    const double freq_ratio = static_cast<double>(space.word_freq[word]) /
                                              (config.subsample *
                                               static_cast<double>(total_words));
                    const double keep = (std::sqrt(freq_ratio) + 1.0) / freq_ratio;
                    if (keep < 1.0 && u01(rng) > keep) continue;
                }
                kept.push_back({word, position, false});
            }

            for (std::size_t center = 0; center < kept.size(); ++center) {
                const KeptToken& token = kept[center];
                if (token.marker && !citation_pass) continue;

                inputs.clear();
                inputs.push_back(d_in);
                const std::size_t lo = center >= config.window ? center - config.window : 0;
                const std::size_t hi = std::min(kept.size(), center + config.window + 1);
                for (std::size_t j = lo; j < hi; ++j) {
                    if (j == center || kept[j].marker) continue;
                    inputs.push_back(space.word_in.data() +
                                     static_cast<std::size_t>(kept[j].index) * dim);
                }

                const double lr = learning_rate(config, token.position, total_positions);
                const SamplingTable& table = token.marker ? doc_table : word_table;
                std::vector<double>& out_table = token.marker ? space.doc_out : space.word_out;
                double* const target =
                    out_table.data() + static_cast<std::size_t>(token.index) * dim;

                negatives.clear();
                for (std::size_t j = 0; j < config.negatives; ++j) {
                    const std::uint32_t draw = table.sample(rng);
                    if (draw == token.index) continue;
                    negatives.push_back(out_table.data() +
                                        static_cast<std::size_t>(draw) * dim);
                }
                detail::ns_apply(inputs, target, negatives, dim, lr, ws);
            }
        }
    }
}

bool has_marker(std::span<const TrainingDocument> docs) {
    for (const TrainingDocument& doc : docs) {
        for (const Token& token : doc.tokens) {
            if (token.is_marker()) return true;
        }
    }
    return false;
}

}  // namespace

bool EmbeddingSpace::finite() const {
    auto ok = [](const std::vector<double>& table) {
        return std::all_of(table.begin(), table.end(),
                           [](double v) { return std::isfinite(v); });
    };
    return ok(word_in) && ok(word_out) && ok(doc_in) && ok(doc_out);
}

EmbeddingSpace train_hd2v(std::span<const TrainingDocument> docs, const TrainConfig& config) {
    validate_config(config);
    if (docs.empty()) throw ConfigError("cannot train on an empty corpus");
    if (!has_marker(docs)) {
        throw ConfigError("corpus contains no citation markers; cannot train document vectors");
    }
    EmbeddingSpace space = init_space(docs, config);
    train_space(space, docs, config, /*citation_pass=*/true);
    return space;
}

EmbeddingSpace train_doc2vec(std::span<const TrainingDocument> docs, const TrainConfig& config) {
    validate_config(config);
    if (docs.empty()) throw ConfigError("cannot train on an empty corpus");
    EmbeddingSpace space = init_space(docs, config);
    train_space(space, docs, config, /*citation_pass=*/false);
    space.doc_out = space.doc_in;  // OUT-mode scoring falls back to d_I
    return space;
}

namespace {

constexpr std::uint64_t kInferSeedOffset = 0x1d0c;

ContextVector infer_mean(const EmbeddingSpace& space, std::span<const Token> query) {
    ContextVector result;
    result.values.assign(space.dim, 0.0);
    std::size_t found = 0;
    for (const Token& token : query) {
        if (token.is_marker()) continue;
        auto it = space.vocab_index.find(token.text);
        if (it == space.vocab_index.end()) continue;
        const auto vec = space.word_in_vec(it->second);
        for (std::size_t d = 0; d < space.dim; ++d) result.values[d] += vec[d];
        ++found;
    }
    if (found == 0) {
        result.all_oov = true;
        return result;
    }
    for (double& v : result.values) v /= static_cast<double>(found);
    return result;
}

ContextVector infer_document(const EmbeddingSpace& space, std::span<const Token> query,
                             const TrainConfig& config) {
    ContextVector result;
    result.values.assign(space.dim, 0.0);

    std::vector<std::uint32_t> words;
    for (const Token& token : query) {
        if (token.is_marker()) continue;
        if (auto it = space.vocab_index.find(token.text); it != space.vocab_index.end()) {
            words.push_back(it->second);
        }
    }
    if (words.empty()) {
        result.all_oov = true;
        return result;
    }

    std::mt19937_64 rng(config.rng_seed + kInferSeedOffset);
    const double scale = 1.0 / static_cast<double>(space.dim);
    for (double& v : result.values) v = (u01(rng) - 0.5) * scale;

    const SamplingTable word_table(space.word_freq);
    const std::size_t sweeps = std::max<std::size_t>(config.epochs, 1);
    const std::uint64_t total = static_cast<std::uint64_t>(sweeps) * words.size();

    detail::NsWorkspace ws;
    std::vector<const double*> inputs;
    std::vector<const double*> negatives;
    std::uint64_t step = 0;
    for (std::size_t sweep = 0; sweep < sweeps; ++sweep) {
        for (std::size_t center = 0; center < words.size(); ++center) {
            const double lr = learning_rate(config, step++, total);
            inputs.clear();
            inputs.push_back(result.values.data());
            const std::size_t lo = center >= config.window ? center - config.window : 0;
            const std::size_t hi = std::min(words.size(), center + config.window + 1);
            for (std::size_t j = lo; j < hi; ++j) {
                if (j == center) continue;
                inputs.push_back(space.word_in.data() +
                                 static_cast<std::size_t>(words[j]) * space.dim);
            }
            const double* target =
                space.word_out.data() + static_cast<std::size_t>(words[center]) * space.dim;
            negatives.clear();
            for (std::size_t j = 0; j < config.negatives; ++j) {
                const std::uint32_t draw = word_table.sample(rng);
                if (draw == words[center]) continue;
                negatives.push_back(space.word_out.data() +
                                    static_cast<std::size_t>(draw) * space.dim);
            }
            // Frozen-parameter inference: only the fresh vector moves.
            detail::ns_compute(inputs, target, negatives, space.dim, ws);
            for (std::size_t d = 0; d < space.dim; ++d) {
                result.values[d] -= lr * ws.grad_inputs[0][d];
            }
        }
    }
    return result;
}

}  // namespace

ContextVector infer_context_vector(const EmbeddingSpace& space, std::span<const Token> query,
                                   QueryMode mode, const TrainConfig& config) {
    if (mode == QueryMode::mean_word_in) return infer_mean(space, query);
    return infer_document(space, query, config);
}

RankedList score_hd2v(const EmbeddingSpace& space, const ContextVector& query, ScoreMode mode,
                      std::size_t k) {
    RankedList result;
    result.source = mode == ScoreMode::out ? "hd2v_out" : "hd2v_inout";
    if (query.all_oov || norm(query.values) == 0.0) return result;

    const double w = space.config.inout_weight;
    std::vector<std::pair<std::uint32_t, double>> scored;
    scored.reserve(space.doc_ids.size());
    for (std::uint32_t i = 0; i < space.doc_ids.size(); ++i) {
        double score = cosine(query.values, space.doc_out_vec(i));
        if (mode == ScoreMode::in_out) {
            score = w * score + (1.0 - w) * cosine(query.values, space.doc_in_vec(i));
        }
        scored.push_back({i, score});
    }
    std::sort(scored.begin(), scored.end(), [&](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return space.doc_ids[a.first] < space.doc_ids[b.first];
    });
    if (scored.size() > k) scored.resize(k);
    result.entries.reserve(scored.size());
    for (const auto& [doc_idx, score] : scored) {
        result.entries.push_back({space.doc_ids[doc_idx], score});
    }
    return result;
}

namespace {
constexpr char kEmbeddingMagic[8] = {'C', 'R', 'E', 'M', 'B', '0', '0', '1'};
}

void save_embedding(const std::filesystem::path& path, const EmbeddingSpace& space) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write model file: " + path.string());
    out.write(kEmbeddingMagic, sizeof(kEmbeddingMagic));
    binio::write_pod<std::uint64_t>(out, space.dim);
    const TrainConfig& c = space.config;
    binio::write_pod<std::uint64_t>(out, c.dim);
    binio::write_pod<std::uint64_t>(out, c.window);
    binio::write_pod<std::uint64_t>(out, c.negatives);
    binio::write_pod<std::uint64_t>(out, c.epochs);
    binio::write_pod<double>(out, c.lr_start);
    binio::write_pod<double>(out, c.lr_end);
    binio::write_pod<double>(out, c.subsample);
    binio::write_pod<std::uint64_t>(out, c.rng_seed);
    binio::write_pod<double>(out, c.inout_weight);

    binio::write_pod<std::uint64_t>(out, space.vocab.size());
    for (std::size_t i = 0; i < space.vocab.size(); ++i) {
        binio::write_string(out, space.vocab[i]);
        binio::write_pod<std::uint64_t>(out, space.word_freq[i]);
    }
    binio::write_pod<std::uint64_t>(out, space.doc_ids.size());
    for (std::size_t i = 0; i < space.doc_ids.size(); ++i) {
        binio::write_string(out, space.doc_ids[i]);
        binio::write_pod<std::uint64_t>(out, space.doc_freq[i]);
    }
    binio::write_doubles(out, space.word_in);
    binio::write_doubles(out, space.word_out);
    binio::write_doubles(out, space.doc_in);
    binio::write_doubles(out, space.doc_out);
    if (!out) throw ConfigError("failed writing model file: " + path.string());
}

EmbeddingSpace load_embedding(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingArtifactError("model file not found: " + path.string());
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kEmbeddingMagic, sizeof(magic)) != 0) {
        throw ConfigError("not an embedding model file: " + path.string());
    }
    EmbeddingSpace space;
    space.dim = binio::read_pod<std::uint64_t>(in);
    TrainConfig& c = space.config;
    c.dim = binio::read_pod<std::uint64_t>(in);
    c.window = binio::read_pod<std::uint64_t>(in);
    c.negatives = binio::read_pod<std::uint64_t>(in);
    c.epochs = binio::read_pod<std::uint64_t>(in);
    c.lr_start = binio::read_pod<double>(in);
    c.lr_end = binio::read_pod<double>(in);
    c.subsample = binio::read_pod<double>(in);
    c.rng_seed = binio::read_pod<std::uint64_t>(in);
    c.inout_weight = binio::read_pod<double>(in);

    const auto vocab_size = binio::read_pod<std::uint64_t>(in);
    space.vocab.reserve(vocab_size);
    space.word_freq.reserve(vocab_size);
    for (std::uint64_t i = 0; i < vocab_size; ++i) {
        space.vocab.push_back(binio::read_string(in));
        space.word_freq.push_back(binio::read_pod<std::uint64_t>(in));
        space.vocab_index.emplace(space.vocab.back(), static_cast<std::uint32_t>(i));
    }
    const auto doc_count = binio::read_pod<std::uint64_t>(in);
    space.doc_ids.reserve(doc_count);
    space.doc_freq.reserve(doc_count);
    for (std::uint64_t i = 0; i < doc_count; ++i) {
        space.doc_ids.push_back(binio::read_string(in));
        space.doc_freq.push_back(binio::read_pod<std::uint64_t>(in));
        space.doc_index.emplace(space.doc_ids.back(), static_cast<std::uint32_t>(i));
    }
    space.word_in = binio::read_doubles(in);
    space.word_out = binio::read_doubles(in);
    space.doc_in = binio::read_doubles(in);
    space.doc_out = binio::read_doubles(in);
    return space;
}

}  // namespace citerec
