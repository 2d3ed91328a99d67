#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "citerec/corpus.hpp"
#include "citerec/errors.hpp"
#include "support/synthetic.hpp"
#include "support/temp_dir.hpp"

using namespace citerec;
using testsupport::TempDir;

namespace {

Document make_doc(std::string id, int year, std::string title, std::string abstract,
                  std::vector<CitationContext> contexts = {}) {
    Document doc;
    doc.id = std::move(id);
    doc.year = year;
    doc.title = std::move(title);
    doc.abstract = std::move(abstract);
    doc.contexts = std::move(contexts);
    return doc;
}

void write_lines(const std::filesystem::path& path, std::initializer_list<std::string_view> lines) {
    std::ofstream out(path, std::ios::binary);
    for (auto line : lines) out << line << '\n';
}

std::size_t total_tokens(const std::vector<TrainingDocument>& docs) {
    return std::accumulate(docs.begin(), docs.end(), std::size_t{0},
                           [](std::size_t sum, const TrainingDocument& d) {
                               return sum + d.tokens.size();
                           });
}

}  // namespace

TEST_CASE("loader reads valid JSONL records verbatim", "[corpus]") {
    TempDir dir;
    write_lines(dir.file("corpus.jsonl"),
                {R"({"id":"a","year":2001,"title":"First Paper","abstract":"about cats",)"
                 R"("contexts":[{"text":"cites the second","cited_ids":["b"]}]})",
                 R"({"id":"b","year":2002,"title":"Second","abstract":""})",
                 R"({"id":"c","year":2003,"title":"Third","abstract":"plain","contexts":[]})"});

    LoadReport report;
    const auto docs = load_corpus(dir.file("corpus.jsonl"), report);

    REQUIRE(docs.size() == 3);
    CHECK(report.documents_loaded == 3);
    CHECK(report.malformed_lines == 0);
    CHECK(report.rejected_documents == 0);
    CHECK(report.dropped_contexts == 0);
    CHECK(report.merged_contexts == 0);
    CHECK(report.dangling_references == 0);

    CHECK(docs[0].id == "a");
    CHECK(docs[0].year == 2001);
    CHECK(docs[0].title == "First Paper");
    REQUIRE(docs[0].contexts.size() == 1);
    CHECK(docs[0].contexts[0].cited_ids == std::vector<std::string>{"b"});
    CHECK(docs[1].contexts.empty());
}

TEST_CASE("duplicate document ids are fatal and name the offender", "[corpus]") {
    TempDir dir;
    write_lines(dir.file("dup.jsonl"), {R"({"id":"p7","year":2001})", R"({"id":"p8","year":2001})",
                                        R"({"id":"p7","year":2005})"});
    LoadReport report;
    try {
        load_corpus(dir.file("dup.jsonl"), report);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("p7") != std::string::npos);
    }
}

TEST_CASE("loader counts malformed, rejected, dropped, merged, and dangling rows", "[corpus]") {
    TempDir dir;
    write_lines(
        dir.file("messy.jsonl"),
        {R"({"id":"a","year":2001,"contexts":[{"text":"cites b and a ghost","cited_ids":["b","ghost"]}]})",
         R"({this is not json)",
         R"({"id":"","year":2001})",
         R"({"id":"noyear","title":"missing year"})",
         "",
         R"({"id":"b","year":2002,"contexts":[{"text":"no targets","cited_ids":[]}]})",
         R"({"id":"d","year":2003,"contexts":[{"text":"same words","cited_ids":["a"]},)"
         R"({"text":"same words","cited_ids":["b"]}]})"});

    LoadReport report;
    const auto docs = load_corpus(dir.file("messy.jsonl"), report);

    REQUIRE(docs.size() == 3);  // a, b, d
    CHECK(report.documents_loaded == 3);
    CHECK(report.malformed_lines == 1);
    CHECK(report.rejected_documents == 2);
    CHECK(report.dropped_contexts == 1);
    CHECK(report.merged_contexts == 1);
    CHECK(report.dangling_references == 1);  // "ghost"

    // The merged context carries the union of the duplicate rows' targets.
    const Document& d = docs[2];
    REQUIRE(d.contexts.size() == 1);
    CHECK(d.contexts[0].cited_ids == std::vector<std::string>{"a", "b"});

    // Every diagnostic message carries a line number.
    for (const auto& message : report.messages) {
        CHECK(message.find("line ") == 0);
    }
}

TEST_CASE("saving and reloading a corpus is the identity", "[corpus]") {
    const auto corpus = testsupport::small_corpus(11);
    TempDir dir;
    save_corpus(dir.file("round.jsonl"), corpus.documents);
    LoadReport report;
    const auto reloaded = load_corpus(dir.file("round.jsonl"), report);
    CHECK(reloaded == corpus.documents);
    CHECK(report.dangling_references == 0);
}

TEST_CASE("citing pseudo-full-text places markers at context midpoints", "[corpus]") {
    SECTION("title-only document has no markers") {
        const auto out = build_pseudo_fulltext(std::vector<Document>{
            make_doc("solo", 2000, "Lonely Title Words", "")});
        REQUIRE(out.size() == 1);
        CHECK(out[0].id == "solo");
        CHECK(out[0].orientation == Orientation::citing);
        CHECK(out[0].tokens == testsupport::word_tokens({"lonely", "title", "words"}));
    }

    SECTION("even-length context splits after half its tokens") {
        std::vector<Document> docs{
            make_doc("x", 2000, "", ""),
            make_doc("a", 2001, "", "", {{"alpha beta gamma delta", {"x"}}})};
        const auto out = build_pseudo_fulltext(docs);
        CHECK(out[1].tokens ==
              std::vector<Token>{Token::word("alpha"), Token::word("beta"), Token::marker("x"),
                                 Token::word("gamma"), Token::word("delta")});
    }

    SECTION("odd-length context floors the midpoint") {
        std::vector<Document> docs{
            make_doc("x", 2000, "", ""),
            make_doc("a", 2001, "", "", {{"one two three four five", {"x"}}})};
        const auto out = build_pseudo_fulltext(docs);
        CHECK(out[1].tokens ==
              std::vector<Token>{Token::word("one"), Token::word("two"), Token::marker("x"),
                                 Token::word("three"), Token::word("four"), Token::word("five")});
    }

    SECTION("multi-cite contexts emit adjacent markers in sorted id order") {
        std::vector<Document> docs{
            make_doc("y", 2000, "", ""), make_doc("x", 2000, "", ""),
            make_doc("a", 2001, "", "", {{"left side right side", {"y", "x"}}})};
        const auto out = build_pseudo_fulltext(docs);
        CHECK(out[2].tokens ==
              std::vector<Token>{Token::word("left"), Token::word("side"), Token::marker("x"),
                                 Token::marker("y"), Token::word("right"), Token::word("side")});
    }

    SECTION("dangling cited ids produce no marker but keep the text") {
        std::vector<Document> docs{
            make_doc("a", 2001, "", "", {{"refers to a ghost", {"ghost"}}})};
        const auto out = build_pseudo_fulltext(docs);
        CHECK(out[0].tokens == testsupport::word_tokens({"refers", "to", "a", "ghost"}));
    }

    SECTION("header precedes contexts in document order") {
        std::vector<Document> docs{
            make_doc("x", 2000, "", ""),
            make_doc("a", 2001, "My Title", "My abstract.",
                     {{"first context", {"x"}}, {"second context", {"x"}}})};
        const auto out = build_pseudo_fulltext(docs);
        CHECK(out[1].tokens ==
              std::vector<Token>{Token::word("my"), Token::word("title"), Token::word("my"),
                                 Token::word("abstract"), Token::word("first"), Token::marker("x"),
                                 Token::word("context"), Token::word("second"), Token::marker("x"),
                                 Token::word("context")});
    }
}

TEST_CASE("cited pseudo-full-text gathers in-link contexts in citing order", "[corpus]") {
    std::vector<Document> docs{
        make_doc("d", 2000, "Target Title", "target abstract"),
        // "b" sorts after "a": its context must come second even though the
        // document appears first in the input.
        make_doc("b", 2001, "", "", {{"from b one", {"d"}}}),
        make_doc("a", 2002, "", "",
                 {{"early context text", {"d"}}, {"later context text", {"d", "ghost"}}}),
        make_doc("lonely", 2003, "Never Cited", "header only")};

    const auto out = build_cited_pseudo_fulltext(docs);
    REQUIRE(out.size() == 4);
    CHECK(out[0].orientation == Orientation::cited);

    CHECK(out[0].tokens ==
          std::vector<Token>{Token::word("target"), Token::word("title"), Token::word("target"),
                             Token::word("abstract"),
                             // a's contexts in index order, then b's.
                             Token::word("early"), Token::marker("d"), Token::word("context"),
                             Token::word("text"), Token::word("later"), Token::marker("d"),
                             Token::word("context"), Token::word("text"), Token::word("from"),
                             Token::marker("d"), Token::word("b"), Token::word("one")});

    // A document nobody cites keeps only its header.
    CHECK(out[3].tokens == testsupport::word_tokens({"never", "cited", "header", "only"}));
}

TEST_CASE("context token mass is conserved between orientations", "[corpus]") {
    // Every context in this corpus cites exactly one in-corpus document, so
    // each context's tokens appear exactly once per orientation.
    const auto corpus = testsupport::cited_vocabulary_corpus(5);
    const auto citing = build_pseudo_fulltext(corpus.documents);
    const auto cited = build_cited_pseudo_fulltext(corpus.documents);
    CHECK(total_tokens(citing) == total_tokens(cited));
}

TEST_CASE("min-citation filter keeps the at-least boundary", "[corpus]") {
    // 51 documents citing each other completely: every document has exactly
    // 50 in-links, and the set is self-consistent under peeling.
    std::vector<Document> docs;
    std::vector<std::string> ids;
    for (int i = 0; i < 51; ++i) {
        ids.push_back("q" + std::string(i < 10 ? "0" : "") + std::to_string(i));
    }
    for (int i = 0; i < 51; ++i) {
        std::vector<CitationContext> contexts;
        for (int j = 0; j < 51; ++j) {
            if (j != i) contexts.push_back({"cites " + ids[j], {ids[j]}});
        }
        docs.push_back(make_doc(ids[i], 2000, "", "", std::move(contexts)));
    }
    // One straggler cited by only 49 clique members.
    docs.push_back(make_doc("straggler", 2000, "", ""));
    for (int i = 0; i < 49; ++i) {
        docs[i].contexts.push_back({"also cites the straggler", {"straggler"}});
    }

    const auto kept = filter_min_citations(docs, 50);
    REQUIRE(kept.size() == 51);
    for (const Document& doc : kept) CHECK(doc.id != "straggler");

    CHECK(filter_min_citations(docs, 51).empty());
}

TEST_CASE("min-citation filter with zero threshold is the identity", "[corpus]") {
    const auto corpus = testsupport::small_corpus(3);
    CHECK(filter_min_citations(corpus.documents, 0) == corpus.documents);
}

TEST_CASE("min-citation filter peels cascading removals to a fixed point", "[corpus]") {
    // A citation chain collapses entirely: the head has no in-links, and each
    // removal strips the next document's only citation.
    std::vector<Document> chain;
    for (int i = 0; i < 6; ++i) {
        std::vector<CitationContext> contexts;
        if (i + 1 < 6) contexts.push_back({"cites next", {"n" + std::to_string(i + 1)}});
        chain.push_back(make_doc("n" + std::to_string(i), 2000, "", "", std::move(contexts)));
    }
    CHECK(filter_min_citations(chain, 1).empty());
}

TEST_CASE("applying the filter twice equals filtering at the larger threshold", "[corpus]") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n = 8 + rng() % 12;
        std::vector<std::string> pool;
        for (std::size_t i = 0; i < n; ++i) pool.push_back("r" + std::to_string(i));
        std::vector<Document> docs;
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<CitationContext> contexts;
            const std::size_t n_ctx = rng() % 4;
            for (std::size_t c = 0; c < n_ctx; ++c) {
                std::string cited = pool[rng() % n];
                contexts.push_back({"ctx " + std::to_string(c), {std::move(cited)}});
            }
            docs.push_back(make_doc(pool[i], 2000, "", "", std::move(contexts)));
        }
        for (std::size_t a = 1; a <= 3; ++a) {
            for (std::size_t b = 1; b <= 3; ++b) {
                const auto chained = filter_min_citations(filter_min_citations(docs, b), a);
                const auto direct = filter_min_citations(docs, std::max(a, b));
                CHECK(chained == direct);
            }
        }
    }
}

TEST_CASE("year split partitions documents and validates ranges", "[corpus]") {
    std::vector<Document> docs{make_doc("old", 1991, "", ""), make_doc("edge", 2016, "", ""),
                               make_doc("fresh", 2017, "", ""), make_doc("future", 2020, "", "")};

    auto [train, test] = split_train_test(docs, {1991, 2016}, {2017, 2017});
    REQUIRE(train.size() == 2);
    REQUIRE(test.size() == 1);
    CHECK(train[0].id == "old");
    CHECK(train[1].id == "edge");
    CHECK(test[0].id == "fresh");  // 2020 is outside both ranges and dropped

    CHECK_THROWS_AS(split_train_test(docs, {1991, 2016}, {2016, 2017}), ConfigError);
    CHECK_THROWS_AS(split_train_test(docs, {2016, 1991}, {2017, 2017}), ConfigError);
    CHECK_THROWS_AS(split_train_test(docs, {1991, 2016}, {2018, 2017}), ConfigError);
}

TEST_CASE("test-query extraction filters truth, length, and duplicates", "[corpus]") {
    const std::unordered_set<std::string> train_ids{"x", "y"};
    const auto& stopwords = default_stopwords();

    SECTION("ground truth is intersected with the training set") {
        std::vector<Document> source{make_doc(
            "t1", 2017, "", "",
            {{"neural citation ranking methods compared strong lexical baselines offline",
              {"outside", "y"}}})};
        const auto queries = extract_test_queries(source, train_ids, stopwords);
        REQUIRE(queries.size() == 1);
        CHECK(queries[0].ground_truth == std::set<std::string>{"y"});
        CHECK(queries[0].source_year == 2017);
    }

    SECTION("contexts with no surviving truth are dropped") {
        std::vector<Document> source{make_doc(
            "t1", 2017, "", "",
            {{"neural citation ranking methods compared strong lexical baselines offline",
              {"outside"}}})};
        CHECK(extract_test_queries(source, train_ids, stopwords).empty());
    }

    SECTION("eight non-stopword tokens are too few, nine are enough") {
        std::vector<Document> source{
            make_doc("t1", 2017, "", "",
                     {// 8 content words padded with a stop word.
                      {"the neural citation ranking methods compared strong lexical baselines",
                       {"x"}},
                      {"neural citation ranking methods compared strong lexical baselines offline",
                       {"y"}}})};
        const auto queries = extract_test_queries(source, train_ids, stopwords);
        REQUIRE(queries.size() == 1);
        CHECK(queries[0].ground_truth == std::set<std::string>{"y"});
        CHECK(queries[0].context_tokens.size() == 9);
    }

    SECTION("identical contexts merge into one query with unioned truth") {
        const std::string text =
            "graph embedding models retrieve candidate citations using contextual similarity";
        std::vector<Document> source{make_doc("t1", 2017, "", "", {{text, {"x"}}}),
                                     make_doc("t2", 2018, "", "", {{text, {"y"}}})};
        const auto queries = extract_test_queries(source, train_ids, stopwords);
        REQUIRE(queries.size() == 1);
        CHECK(queries[0].ground_truth == std::set<std::string>{"x", "y"});
    }

    SECTION("markers and stop words never reach the query tokens") {
        std::vector<Document> source{make_doc(
            "t1", 2017, "", "",
            {{"the model " + marker_wire("x") +
                  " ranks citation candidates using learned context vectors effectively today",
              {"x"}}})};
        const auto queries = extract_test_queries(source, train_ids, stopwords);
        REQUIRE(queries.size() == 1);
        for (const Token& token : queries[0].context_tokens) {
            CHECK_FALSE(token.is_marker());
            CHECK_FALSE(stopwords.contains(token));
        }
    }
}

TEST_CASE("extracted queries never reference ids outside the training set", "[corpus]") {
    const auto corpus = testsupport::clustered_corpus(2);
    auto [train, test] = split_train_test(corpus.documents, corpus.train_years, corpus.test_years);
    std::unordered_set<std::string> train_ids;
    for (const Document& doc : train) train_ids.insert(doc.id);

    const auto queries = extract_test_queries(test, train_ids, default_stopwords());
    REQUIRE_FALSE(queries.empty());
    for (const TestQuery& query : queries) {
        REQUIRE_FALSE(query.ground_truth.empty());
        for (const auto& id : query.ground_truth) CHECK(train_ids.count(id) == 1);
        CHECK(query.context_tokens.size() >= 9);
    }
}

TEST_CASE("training corpus files round-trip with exact marker wire forms", "[corpus]") {
    const auto corpus = testsupport::small_corpus(17);
    const auto citing = build_pseudo_fulltext(corpus.documents);

    TempDir dir;
    save_training_corpus(dir.file("train.jsonl"), citing);
    CHECK(load_training_corpus(dir.file("train.jsonl")) == citing);

    // The marker wire form is bit-exact in the serialized stream.
    std::ifstream in(dir.file("train.jsonl"), std::ios::binary);
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string contents = buffer.str();
    CHECK(contents.find("⟦CITE:") != std::string::npos);
    CHECK(contents.find("⟧") != std::string::npos);
}

TEST_CASE("test-query files round-trip exactly", "[corpus]") {
    const auto corpus = testsupport::small_corpus(23);
    auto [train, test] = split_train_test(corpus.documents, corpus.train_years, corpus.test_years);
    std::unordered_set<std::string> train_ids;
    for (const Document& doc : train) train_ids.insert(doc.id);
    const auto queries = extract_test_queries(test, train_ids, default_stopwords());
    REQUIRE_FALSE(queries.empty());

    TempDir dir;
    save_test_queries(dir.file("queries.jsonl"), queries);
    CHECK(load_test_queries(dir.file("queries.jsonl")) == queries);
}
