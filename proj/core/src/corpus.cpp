#include "citerec/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "citerec/errors.hpp"

namespace citerec {

using nlohmann::json;

namespace {

std::string line_msg(std::size_t line_no, const std::string& what) {
    return "line " + std::to_string(line_no) + ": " + what;
}

}  // namespace

std::vector<Document> load_corpus(const std::filesystem::path& path, LoadReport& report) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read corpus file: " + path.string());
    }

    std::vector<Document> docs;
    std::unordered_map<std::string, std::size_t> seen_ids;
    std::string line;
    std::size_t line_no = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

        json record = json::parse(line, nullptr, false);
        if (record.is_discarded() || !record.is_object()) {
            ++report.malformed_lines;
            report.messages.push_back(line_msg(line_no, "not a JSON object, skipped"));
            continue;
        }
        if (!record.contains("id") || !record["id"].is_string() ||
            record["id"].get<std::string>().empty() || !record.contains("year") ||
            !record["year"].is_number_integer()) {
            ++report.rejected_documents;
            report.messages.push_back(line_msg(line_no, "missing id or year, rejected"));
            continue;
        }

        Document doc;
        doc.id = record["id"].get<std::string>();
        doc.year = record["year"].get<int>();
        doc.title = record.value("title", std::string{});
        doc.abstract = record.value("abstract", std::string{});

        if (auto it = seen_ids.find(doc.id); it != seen_ids.end()) {
            throw ConfigError("duplicate document id \"" + doc.id + "\" at line " +
                              std::to_string(line_no) + " (first seen at line " +
                              std::to_string(it->second) + ")");
        }
        seen_ids.emplace(doc.id, line_no);

        std::unordered_map<std::string, std::size_t> context_by_text;
        if (record.contains("contexts") && record["contexts"].is_array()) {
            for (const json& ctx : record["contexts"]) {
                if (!ctx.is_object()) {
                    ++report.dropped_contexts;
                    report.messages.push_back(line_msg(line_no, "non-object context dropped"));
                    continue;
                }
                std::string text = ctx.value("text", std::string{});
                std::vector<std::string> cited;
                if (ctx.contains("cited_ids") && ctx["cited_ids"].is_array()) {
                    for (const json& id : ctx["cited_ids"]) {
                        if (id.is_string() && !id.get<std::string>().empty()) {
                            cited.push_back(id.get<std::string>());
                        }
                    }
                }
                if (cited.empty()) {
                    ++report.dropped_contexts;
                    report.messages.push_back(
                        line_msg(line_no, "context with empty cited_ids dropped"));
                    continue;
                }
                // Duplicate (text, document) rows merge their cited ids.
                auto [slot, inserted] = context_by_text.emplace(text, doc.contexts.size());
                if (inserted) {
                    doc.contexts.push_back({std::move(text), {}});
                } else {
                    ++report.merged_contexts;
                }
                auto& ids = doc.contexts[slot->second].cited_ids;
                for (std::string& id : cited) {
                    if (std::find(ids.begin(), ids.end(), id) == ids.end()) {
                        ids.push_back(std::move(id));
                    }
                }
            }
        }
        docs.push_back(std::move(doc));
        ++report.documents_loaded;
    }

    std::unordered_set<std::string> known;
    known.reserve(docs.size());
    for (const Document& d : docs) known.insert(d.id);
    for (const Document& d : docs) {
        for (const CitationContext& ctx : d.contexts) {
            for (const std::string& id : ctx.cited_ids) {
                if (!known.count(id)) ++report.dangling_references;
            }
        }
    }
    return docs;
}

void save_corpus(const std::filesystem::path& path, std::span<const Document> docs) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot write corpus file: " + path.string());
    }
    for (const Document& doc : docs) {
        json contexts = json::array();
        for (const CitationContext& ctx : doc.contexts) {
            contexts.push_back({{"text", ctx.text}, {"cited_ids", ctx.cited_ids}});
        }
        json record = {{"id", doc.id},
                       {"year", doc.year},
                       {"title", doc.title},
                       {"abstract", doc.abstract},
                       {"contexts", std::move(contexts)}};
        out << record.dump() << '\n';
    }
}

std::string_view orientation_name(Orientation o) {
    return o == Orientation::citing ? "citing" : "cited";
}

Orientation parse_orientation(std::string_view name) {
    if (name == "citing") return Orientation::citing;
    if (name == "cited") return Orientation::cited;
    throw ConfigError("unknown orientation \"" + std::string(name) +
                      "\" (expected citing or cited)");
}

namespace {

// Tokenizes a context and inserts one marker per in-corpus cited id after
// floor(len/2) word tokens, multi-cite markers in sorted id order.
void append_context_tokens(const CitationContext& ctx,
                           const std::unordered_set<std::string>& corpus_ids,
                           std::vector<Token>& out) {
    std::vector<Token> words = tokenize(ctx.text);
    // Context text is expected to be plain; embedded markers would double up,
    // so they are folded into the insertion set instead.
    std::erase_if(words, [](const Token& t) { return t.is_marker(); });

    std::vector<std::string> markers;
    for (const std::string& id : ctx.cited_ids) {
        if (corpus_ids.count(id)) markers.push_back(id);
    }
    std::sort(markers.begin(), markers.end());

    const std::size_t mid = words.size() / 2;
    out.insert(out.end(), words.begin(), words.begin() + mid);
    for (std::string& id : markers) out.push_back(Token::marker(std::move(id)));
    out.insert(out.end(), words.begin() + mid, words.end());
}

std::vector<Token> header_tokens(const Document& doc) {
    std::vector<Token> tokens = tokenize(doc.title);
    std::vector<Token> abstract = tokenize(doc.abstract);
    tokens.insert(tokens.end(), std::make_move_iterator(abstract.begin()),
                  std::make_move_iterator(abstract.end()));
    return tokens;
}

std::unordered_set<std::string> id_set(std::span<const Document> docs) {
    std::unordered_set<std::string> ids;
    ids.reserve(docs.size());
    for (const Document& d : docs) ids.insert(d.id);
    return ids;
}

}  // namespace

std::vector<TrainingDocument> build_pseudo_fulltext(std::span<const Document> docs) {
    const std::unordered_set<std::string> ids = id_set(docs);
    std::vector<TrainingDocument> out;
    out.reserve(docs.size());
    for (const Document& doc : docs) {
        TrainingDocument td{doc.id, Orientation::citing, header_tokens(doc)};
        for (const CitationContext& ctx : doc.contexts) {
            append_context_tokens(ctx, ids, td.tokens);
        }
        out.push_back(std::move(td));
    }
    return out;
}

std::vector<TrainingDocument> build_cited_pseudo_fulltext(std::span<const Document> docs) {
    const std::unordered_set<std::string> ids = id_set(docs);

    // cited id -> contexts citing it, gathered in (citing id, context index)
    // order for determinism.
    struct InLink {
        const Document* citing;
        const CitationContext* context;
    };
    std::unordered_map<std::string, std::vector<InLink>> in_links;
    std::vector<std::size_t> order(docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return docs[a].id < docs[b].id; });
    for (std::size_t idx : order) {
        const Document& citing = docs[idx];
        for (const CitationContext& ctx : citing.contexts) {
            for (const std::string& cited : ctx.cited_ids) {
                if (ids.count(cited)) in_links[cited].push_back({&citing, &ctx});
            }
        }
    }

    std::vector<TrainingDocument> out;
    out.reserve(docs.size());
    for (const Document& doc : docs) {
        TrainingDocument td{doc.id, Orientation::cited, header_tokens(doc)};
        if (auto it = in_links.find(doc.id); it != in_links.end()) {
            for (const InLink& link : it->second) {
                append_context_tokens(*link.context, ids, td.tokens);
            }
        }
        out.push_back(std::move(td));
    }
    return out;
}

std::vector<Document> filter_min_citations(std::vector<Document> docs,
                                           std::size_t min_citations) {
    if (min_citations == 0) return docs;
    for (;;) {
        std::unordered_map<std::string, std::size_t> counts;
        std::unordered_set<std::string> present = id_set(docs);
        for (const Document& doc : docs) {
            for (const CitationContext& ctx : doc.contexts) {
                for (const std::string& cited : ctx.cited_ids) {
                    if (present.count(cited)) ++counts[cited];
                }
            }
        }
        const std::size_t before = docs.size();
        std::erase_if(docs, [&](const Document& d) {
            auto it = counts.find(d.id);
            return (it == counts.end() ? 0 : it->second) < min_citations;
        });
        if (docs.size() == before) return docs;
    }
}

std::pair<std::vector<Document>, std::vector<Document>> split_train_test(
    std::vector<Document> docs, const YearRange& train_years, const YearRange& test_years) {
    if (!train_years.valid()) {
        throw ConfigError("invalid training year range " + std::to_string(train_years.first) +
                          ".." + std::to_string(train_years.last));
    }
    if (!test_years.valid()) {
        throw ConfigError("invalid test year range " + std::to_string(test_years.first) + ".." +
                          std::to_string(test_years.last));
    }
    if (train_years.overlaps(test_years)) {
        throw ConfigError("training and test year ranges overlap");
    }
    std::vector<Document> train;
    std::vector<Document> test;
    for (Document& doc : docs) {
        if (train_years.contains(doc.year)) {
            train.push_back(std::move(doc));
        } else if (test_years.contains(doc.year)) {
            test.push_back(std::move(doc));
        }
    }
    return {std::move(train), std::move(test)};
}

std::vector<TestQuery> extract_test_queries(std::span<const Document> test_source,
                                            const std::unordered_set<std::string>& train_ids,
                                            const StopwordSet& stopwords) {
    std::vector<TestQuery> queries;
    std::unordered_map<std::string, std::size_t> by_text;

    for (const Document& doc : test_source) {
        for (const CitationContext& ctx : doc.contexts) {
            std::vector<Token> tokens = tokenize(ctx.text);
            std::erase_if(tokens, [](const Token& t) { return t.is_marker(); });
            tokens = remove_stopwords(std::move(tokens), stopwords);

            std::set<std::string> truth;
            for (const std::string& id : ctx.cited_ids) {
                if (train_ids.count(id)) truth.insert(id);
            }
            if (truth.empty()) continue;

            std::string key;
            for (const Token& t : tokens) {
                key += t.text;
                key += ' ';
            }
            auto [slot, inserted] = by_text.emplace(std::move(key), queries.size());
            if (inserted) {
                queries.push_back({std::move(tokens), std::move(truth), doc.year});
            } else {
                queries[slot->second].ground_truth.merge(truth);
            }
        }
    }

    std::erase_if(queries, [](const TestQuery& q) { return q.context_tokens.size() < 9; });
    return queries;
}

namespace {

json tokens_to_json(const std::vector<Token>& tokens) {
    json arr = json::array();
    for (const Token& t : tokens) {
        arr.push_back(t.is_marker() ? marker_wire(t.text) : t.text);
    }
    return arr;
}

std::vector<Token> tokens_from_json(const json& arr) {
    std::vector<Token> tokens;
    tokens.reserve(arr.size());
    for (const json& item : arr) {
        std::string text = item.get<std::string>();
        if (auto id = parse_marker_wire(text)) {
            tokens.push_back(Token::marker(std::string(*id)));
        } else {
            tokens.push_back(Token::word(std::move(text)));
        }
    }
    return tokens;
}

}  // namespace

void save_training_corpus(const std::filesystem::path& path,
                          std::span<const TrainingDocument> docs) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot write training corpus: " + path.string());
    }
    for (const TrainingDocument& doc : docs) {
        json record = {{"id", doc.id},
                       {"orientation", orientation_name(doc.orientation)},
                       {"tokens", tokens_to_json(doc.tokens)}};
        out << record.dump() << '\n';
    }
}

std::vector<TrainingDocument> load_training_corpus(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw MissingArtifactError("training corpus not found: " + path.string());
    }
    std::vector<TrainingDocument> docs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json record = json::parse(line, nullptr, false);
        if (record.is_discarded() || !record.contains("id") || !record.contains("tokens")) {
            throw ConfigError("malformed training corpus at " + path.string() + ":" +
                              std::to_string(line_no));
        }
        docs.push_back({record["id"].get<std::string>(),
                        parse_orientation(record.value("orientation", "citing")),
                        tokens_from_json(record["tokens"])});
    }
    return docs;
}

void save_test_queries(const std::filesystem::path& path, std::span<const TestQuery> queries) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot write test queries: " + path.string());
    }
    for (const TestQuery& q : queries) {
        json record = {{"tokens", tokens_to_json(q.context_tokens)},
                       {"ground_truth", q.ground_truth},
                       {"source_year", q.source_year}};
        out << record.dump() << '\n';
    }
}

std::vector<TestQuery> load_test_queries(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw MissingArtifactError("test queries not found: " + path.string());
    }
    std::vector<TestQuery> queries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json record = json::parse(line, nullptr, false);
        if (record.is_discarded() || !record.contains("tokens") ||
            !record.contains("ground_truth")) {
            throw ConfigError("malformed test query file at " + path.string() + ":" +
                              std::to_string(line_no));
        }
        TestQuery q;
        q.context_tokens = tokens_from_json(record["tokens"]);
        for (const json& id : record["ground_truth"]) q.ground_truth.insert(id.get<std::string>());
        q.source_year = record.value("source_year", 0);
        queries.push_back(std::move(q));
    }
    return queries;
}

}  // namespace citerec
