#include "citerec/bm25.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

#include "citerec/errors.hpp"

namespace citerec {

using nlohmann::json;

InvertedIndex InvertedIndex::build(std::span<const TrainingDocument> docs) {
    if (docs.empty()) {
        throw ConfigError("cannot build an index over an empty corpus");
    }
    InvertedIndex index;
    index.doc_ids_.reserve(docs.size());
    index.doc_lengths_.reserve(docs.size());

    std::map<std::string, std::map<std::uint32_t, std::uint32_t>> counts;
    for (const TrainingDocument& doc : docs) {
        if (index.doc_index_.count(doc.id)) {
            throw ConfigError("duplicate training document id \"" + doc.id + "\"");
        }
        const auto doc_idx = static_cast<std::uint32_t>(index.doc_ids_.size());
        index.doc_index_.emplace(doc.id, doc_idx);
        index.doc_ids_.push_back(doc.id);
        index.doc_lengths_.push_back(static_cast<std::uint32_t>(doc.tokens.size()));
        for (const Token& token : doc.tokens) {
            ++counts[token.text][doc_idx];
        }
    }

    index.terms_.reserve(counts.size());
    index.postings_.reserve(counts.size());
    for (auto& [term, per_doc] : counts) {
        std::vector<Posting> postings;
        postings.reserve(per_doc.size());
        for (auto [doc_idx, tf] : per_doc) postings.push_back({doc_idx, tf});
        index.term_index_.emplace(term, static_cast<std::uint32_t>(index.terms_.size()));
        index.terms_.push_back(term);
        index.postings_.push_back(std::move(postings));
    }
    index.finalize();
    return index;
}

void InvertedIndex::finalize() {
    double total = 0.0;
    for (std::uint32_t len : doc_lengths_) total += len;
    avg_doc_length_ = doc_lengths_.empty() ? 0.0 : total / static_cast<double>(doc_lengths_.size());
}

std::size_t InvertedIndex::doc_length(const std::string& doc_id) const {
    auto it = doc_index_.find(doc_id);
    if (it == doc_index_.end()) {
        throw ConfigError("unknown document id \"" + doc_id + "\"");
    }
    return doc_lengths_[it->second];
}

std::size_t InvertedIndex::doc_frequency(const std::string& term) const {
    auto it = term_index_.find(term);
    return it == term_index_.end() ? 0 : postings_[it->second].size();
}

double InvertedIndex::idf(const std::string& term) const {
    const auto df = static_cast<double>(doc_frequency(term));
    if (df == 0.0) return 0.0;
    const auto n = static_cast<double>(doc_count());
    // Robertson/Sparck-Jones with +1 inside the log: non-negative even when
    // df > N/2 on tiny corpora.
    return std::log((n - df + 0.5) / (df + 0.5) + 1.0);
}

namespace {

double term_doc_weight(const Bm25Params& params, double tf, double doc_len, double avgdl) {
    const double norm = params.k1 * (1.0 - params.b + params.b * doc_len / avgdl);
    return tf * (params.k1 + 1.0) / (tf + norm);
}

}  // namespace

double InvertedIndex::score(const Bm25Params& params, std::span<const Token> query,
                            const std::string& doc_id) const {
    auto doc_it = doc_index_.find(doc_id);
    if (doc_it == doc_index_.end()) {
        throw ConfigError("unknown document id \"" + doc_id + "\"");
    }
    const std::uint32_t doc_idx = doc_it->second;
    const double doc_len = doc_lengths_[doc_idx];

    double total = 0.0;
    for (const Token& token : query) {
        if (token.is_marker()) continue;
        auto term_it = term_index_.find(token.text);
        if (term_it == term_index_.end()) continue;
        const std::vector<Posting>& postings = postings_[term_it->second];
        auto posting = std::lower_bound(
            postings.begin(), postings.end(), doc_idx,
            [](const Posting& p, std::uint32_t idx) { return p.doc < idx; });
        if (posting == postings.end() || posting->doc != doc_idx) continue;
        total += idf(token.text) *
                 term_doc_weight(params, posting->tf, doc_len, avg_doc_length_);
    }
    return total;
}

RankedList InvertedIndex::top_k(const Bm25Params& params, std::span<const Token> query,
                                std::size_t k) const {
    std::unordered_map<std::uint32_t, double> accum;
    for (const Token& token : query) {
        if (token.is_marker()) continue;
        auto term_it = term_index_.find(token.text);
        if (term_it == term_index_.end()) continue;
        const double term_idf = idf(token.text);
        for (const Posting& posting : postings_[term_it->second]) {
            accum[posting.doc] += term_idf * term_doc_weight(params, posting.tf,
                                                             doc_lengths_[posting.doc],
                                                             avg_doc_length_);
        }
    }

    std::vector<std::pair<std::uint32_t, double>> scored(accum.begin(), accum.end());
    std::sort(scored.begin(), scored.end(), [&](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return doc_ids_[a.first] < doc_ids_[b.first];
    });
    if (scored.size() > k) scored.resize(k);

    RankedList result;
    result.source = "bm25";
    result.entries.reserve(scored.size());
    for (const auto& [doc_idx, score] : scored) {
        result.entries.push_back({doc_ids_[doc_idx], score});
    }
    return result;
}

void InvertedIndex::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot write index file: " + path.string());
    }
    json terms = json::array();
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        json postings = json::array();
        for (const Posting& p : postings_[i]) postings.push_back({p.doc, p.tf});
        terms.push_back({{"t", terms_[i]}, {"p", std::move(postings)}});
    }
    json docs = json::array();
    for (std::size_t i = 0; i < doc_ids_.size(); ++i) {
        docs.push_back({{"id", doc_ids_[i]}, {"len", doc_lengths_[i]}});
    }
    json model = {{"format", "citerec.bm25"},
                  {"version", 1},
                  {"docs", std::move(docs)},
                  {"terms", std::move(terms)}};
    out << model.dump() << '\n';
}

InvertedIndex InvertedIndex::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw MissingArtifactError("index file not found: " + path.string());
    }
    json model = json::parse(in, nullptr, false);
    if (model.is_discarded() || model.value("format", "") != "citerec.bm25") {
        throw ConfigError("not a bm25 index file: " + path.string());
    }
    InvertedIndex index;
    for (const json& doc : model["docs"]) {
        index.doc_index_.emplace(doc["id"].get<std::string>(),
                                 static_cast<std::uint32_t>(index.doc_ids_.size()));
        index.doc_ids_.push_back(doc["id"].get<std::string>());
        index.doc_lengths_.push_back(doc["len"].get<std::uint32_t>());
    }
    for (const json& term : model["terms"]) {
        std::vector<Posting> postings;
        postings.reserve(term["p"].size());
        for (const json& p : term["p"]) {
            postings.push_back({p[0].get<std::uint32_t>(), p[1].get<std::uint32_t>()});
        }
        index.term_index_.emplace(term["t"].get<std::string>(),
                                  static_cast<std::uint32_t>(index.terms_.size()));
        index.terms_.push_back(term["t"].get<std::string>());
        index.postings_.push_back(std::move(postings));
    }
    index.finalize();
    return index;
}

}  // namespace citerec
