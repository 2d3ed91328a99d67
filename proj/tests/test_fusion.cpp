#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "citerec/errors.hpp"
#include "citerec/fusion.hpp"
#include "citerec/recommenders.hpp"

using namespace citerec;
using Catch::Approx;

namespace {

RankedList list_of(std::string source, std::initializer_list<std::string_view> ids) {
    RankedList list;
    list.source = std::move(source);
    double score = static_cast<double>(ids.size());
    for (auto id : ids) list.entries.push_back({std::string(id), score -= 1.0});
    return list;
}

std::uint64_t count_sum(const FusedList& fused) {
    return std::accumulate(fused.entries.begin(), fused.entries.end(), std::uint64_t{0},
                           [](std::uint64_t sum, const FusedEntry& e) { return sum + e.count; });
}

std::vector<std::string> fused_ids(const FusedList& fused) {
    std::vector<std::string> out;
    for (const auto& entry : fused.entries) out.push_back(entry.id);
    return out;
}

}  // namespace

TEST_CASE("reciprocal ranks become fitness scores", "[fusion]") {
    const std::vector<RankedList> lists{list_of("one", {"A", "B", "C"})};
    const auto fitness = fitness_scores(lists);
    REQUIRE(fitness.size() == 3);
    CHECK(fitness.at("A") == std::vector<double>{1.0});
    CHECK(fitness.at("B") == std::vector<double>{0.5});
    CHECK(fitness.at("C") == std::vector<double>{1.0 / 3.0});
}

TEST_CASE("a doc in several lists keeps every score", "[fusion]") {
    const std::vector<RankedList> lists{list_of("one", {"A", "B"}), list_of("two", {"B", "A"})};
    const auto fitness = fitness_scores(lists);
    CHECK(fitness.at("A") == std::vector<double>{1.0, 0.5});
    CHECK(fitness.at("B") == std::vector<double>{0.5, 1.0});
}

TEST_CASE("empty component lists contribute nothing", "[fusion]") {
    const std::vector<RankedList> lists{list_of("one", {"A"}), list_of("two", {})};
    const auto fitness = fitness_scores(lists);
    CHECK(fitness.size() == 1);
    CHECK(fitness.count("A") == 1);
}

TEST_CASE("component weights scale one list's fitness", "[fusion]") {
    const std::vector<RankedList> lists{list_of("one", {"A", "B"}), list_of("two", {"C"})};
    const std::vector<double> weights{2.0, 1.0};
    const auto fitness = fitness_scores(lists, weights);
    CHECK(fitness.at("A") == std::vector<double>{2.0});
    CHECK(fitness.at("B") == std::vector<double>{1.0});
    CHECK(fitness.at("C") == std::vector<double>{1.0});

    const std::vector<double> wrong_arity{1.0};
    CHECK_THROWS_AS(fitness_scores(lists, wrong_arity), ConfigError);
}

TEST_CASE("probabilities sum fitness and normalize exactly", "[fusion]") {
    // Lists [A,B] and [B,C]: A=1, B=0.5+1=1.5, C=0.5, total 3.
    const std::vector<RankedList> lists{list_of("one", {"A", "B"}), list_of("two", {"B", "C"})};
    const auto p = to_probabilities(fitness_scores(lists));
    REQUIRE(p.size() == 3);
    CHECK(p.at("A") == Approx(1.0 / 3.0).margin(1e-15));
    CHECK(p.at("B") == Approx(1.0 / 2.0).margin(1e-15));
    CHECK(p.at("C") == Approx(1.0 / 6.0).margin(1e-15));

    const double total = p.at("A") + p.at("B") + p.at("C");
    CHECK(total == Approx(1.0).margin(1e-12));
}

TEST_CASE("a single candidate gets probability one", "[fusion]") {
    const std::vector<RankedList> lists{list_of("one", {"A"})};
    const auto p = to_probabilities(fitness_scores(lists));
    CHECK(p.at("A") == Approx(1.0).margin(1e-15));
    CHECK_THROWS_AS(to_probabilities({}), ConfigError);
}

TEST_CASE("symmetric inputs give symmetric probabilities", "[fusion]") {
    const std::vector<RankedList> lists{list_of("one", {"A", "B"}), list_of("two", {"B", "A"})};
    const auto p = to_probabilities(fitness_scores(lists));
    CHECK(p.at("A") == Approx(p.at("B")).margin(1e-15));
}

TEST_CASE("probabilities sum to one on random inputs", "[fusion]") {
    std::mt19937_64 rng(55);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<RankedList> lists(1 + rng() % 3);
        bool any = false;
        for (auto& list : lists) {
            std::vector<std::string> pool{"a", "b", "c", "d", "e", "f", "g", "h"};
            std::shuffle(pool.begin(), pool.end(), rng);
            const std::size_t len = rng() % (pool.size() + 1);
            double score = 10.0;
            for (std::size_t i = 0; i < len; ++i) list.entries.push_back({pool[i], score -= 1.0});
            any = any || len > 0;
        }
        if (!any) continue;
        const auto p = to_probabilities(fitness_scores(lists));
        double total = 0.0;
        for (const auto& [id, prob] : p) total += prob;
        CHECK(total == Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("fusing a single-candidate pool assigns it every draw", "[fusion]") {
    const std::vector<RankedList> lists{list_of("one", {"A"}), list_of("two", {"A"})};
    FusionConfig config;
    config.n_draws = 12345;
    const auto fused = fuse(lists, config);
    REQUIRE(fused.size() == 1);
    CHECK(fused.entries[0].id == "A");
    CHECK(fused.entries[0].count == 12345);
    CHECK(fused.entries[0].probability == Approx(1.0));
    CHECK(fused.n_draws == 12345);
}

TEST_CASE("a million draws order candidates by exact probability", "[fusion]") {
    const std::vector<RankedList> lists{list_of("one", {"A", "B"}), list_of("two", {"B", "C"})};
    for (std::uint64_t seed : {1ULL, 7ULL, 123ULL}) {
        FusionConfig config;
        config.n_draws = 1'000'000;
        config.rng_seed = seed;
        const auto fused = fuse(lists, config);

        REQUIRE(fused.size() == 3);
        CHECK(fused_ids(fused) == std::vector<std::string>{"B", "A", "C"});
        CHECK(count_sum(fused) == config.n_draws);
        CHECK(fused.entries[0].probability == Approx(0.5).margin(1e-15));
        CHECK(fused.entries[1].probability == Approx(1.0 / 3.0).margin(1e-15));
        CHECK(fused.entries[2].probability == Approx(1.0 / 6.0).margin(1e-15));

        // Empirical frequencies concentrate within five standard deviations.
        const double n = static_cast<double>(config.n_draws);
        for (const auto& entry : fused.entries) {
            const double p = entry.probability;
            const double sigma = std::sqrt(p * (1.0 - p) / n);
            CHECK(std::abs(static_cast<double>(entry.count) / n - p) <= 5.0 * sigma);
        }
    }
}

TEST_CASE("empirical frequencies track probabilities on random pools", "[fusion]") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<RankedList> lists(2 + rng() % 2);
        for (auto& list : lists) {
            std::vector<std::string> pool{"a", "b", "c", "d", "e", "f", "g", "h",
                                          "i", "j", "k", "l"};
            std::shuffle(pool.begin(), pool.end(), rng);
            const std::size_t len = 1 + rng() % 8;
            double score = 20.0;
            for (std::size_t i = 0; i < len; ++i) list.entries.push_back({pool[i], score -= 1.0});
        }
        FusionConfig config;
        config.n_draws = 200'000;
        config.rng_seed = 1000 + static_cast<std::uint64_t>(trial);
        const auto fused = fuse(lists, config);

        CHECK(count_sum(fused) == config.n_draws);
        const double n = static_cast<double>(config.n_draws);
        for (const auto& entry : fused.entries) {
            const double sigma = std::sqrt(entry.probability * (1.0 - entry.probability) / n);
            CHECK(std::abs(static_cast<double>(entry.count) / n - entry.probability) <=
                  5.0 * sigma);
        }
    }
}

TEST_CASE("fusing a list with itself reproduces its order", "[fusion]") {
    const auto base = list_of("one", {"d1", "d2", "d3", "d4", "d5", "d6"});
    const std::vector<RankedList> lists{base, base};
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        FusionConfig config;
        config.rng_seed = seed;
        const auto fused = fuse(lists, config);
        CHECK(fused_ids(fused) ==
              std::vector<std::string>{"d1", "d2", "d3", "d4", "d5", "d6"});
    }
}

TEST_CASE("fusing against an empty component preserves the other order", "[fusion]") {
    const auto base = list_of("one", {"x1", "x2", "x3", "x4"});
    const std::vector<RankedList> lists{base, RankedList{"empty", {}}};
    FusionConfig config;
    const auto fused = fuse(lists, config);
    CHECK(fused_ids(fused) == std::vector<std::string>{"x1", "x2", "x3", "x4"});
}

TEST_CASE("fusing only empty lists yields an empty result", "[fusion]") {
    const std::vector<RankedList> lists{RankedList{"a", {}}, RankedList{"b", {}}};
    const auto fused = fuse(lists, FusionConfig{});
    CHECK(fused.empty());
    CHECK(fused.n_draws == FusionConfig{}.n_draws);
}

TEST_CASE("fusion never emits a doc absent from every component", "[fusion]") {
    const std::vector<RankedList> lists{list_of("one", {"A", "B"}), list_of("two", {"C"})};
    const auto fused = fuse(lists, FusionConfig{});
    for (const auto& entry : fused.entries) {
        CHECK((entry.id == "A" || entry.id == "B" || entry.id == "C"));
    }
}

TEST_CASE("fusion truncates both its inputs and its output at k", "[fusion]") {
    const std::vector<RankedList> lists{list_of("one", {"A", "B", "C"}),
                                        list_of("two", {"D", "E", "F"})};

    SECTION("output truncation keeps the most-drawn entries") {
        FusionConfig config;
        config.k = 2;
        config.n_draws = 100'000;
        // Input truncation limits the pool to {A, B, D, E}.
        const auto fused = fuse(lists, config);
        REQUIRE(fused.size() == 2);
        CHECK(count_sum(fused) <= config.n_draws);
        const auto ids = fused_ids(fused);
        CHECK(std::is_sorted(fused.entries.begin(), fused.entries.end(),
                             [](const FusedEntry& a, const FusedEntry& b) {
                                 return a.count > b.count;
                             }));
        for (const auto& id : ids) {
            CHECK((id == "A" || id == "B" || id == "D" || id == "E"));
        }
    }

    SECTION("k=1 collapses each component to its top entry") {
        FusionConfig config;
        config.k = 1;
        config.n_draws = 1000;
        const auto fused = fuse(lists, config);
        REQUIRE(fused.size() == 1);
        CHECK((fused.entries[0].id == "A" || fused.entries[0].id == "D"));
    }
}

TEST_CASE("fusion is deterministic for a fixed seed and validates its config", "[fusion]") {
    const std::vector<RankedList> lists{list_of("one", {"A", "B", "C"}),
                                        list_of("two", {"B", "D"})};
    FusionConfig config;
    config.n_draws = 50'000;
    config.rng_seed = 99;
    const auto first = fuse(lists, config);
    const auto second = fuse(lists, config);
    CHECK(first == second);

    FusionConfig bad_k;
    bad_k.k = 0;
    CHECK_THROWS_AS(fuse(lists, bad_k), ConfigError);
    FusionConfig bad_n;
    bad_n.n_draws = 0;
    CHECK_THROWS_AS(fuse(lists, bad_n), ConfigError);
}

TEST_CASE("fusion defaults match the component depth and draw count", "[fusion]") {
    const FusionConfig config;
    CHECK(config.k == 500);
    CHECK(config.n_draws == 1'000'000);
}

TEST_CASE("two-component hybrid fuses bm25 with the embedding list", "[fusion][hybrid]") {
    const auto bm25 = list_of("bm25", {"A", "B", "C"});
    const auto hd2v = list_of("hd2v_out", {"B", "C", "D"});
    FusionConfig config;
    config.n_draws = 100'000;
    const auto fused = hybrid12(bm25, hd2v, config);
    CHECK(fused.source == "hybrid");
    CHECK(count_sum(fused) == config.n_draws);
    // B leads: its summed fitness 1.5 dominates A's 1.0.
    CHECK(fused.entries[0].id == "B");

    // Degenerate case: an empty embedding list leaves bm25's order.
    const auto degenerate = hybrid12(bm25, RankedList{"hd2v_out", {}}, config);
    CHECK(fused_ids(degenerate) == std::vector<std::string>{"A", "B", "C"});
}

TEST_CASE("three-component hybrid pools up to three lists", "[fusion][hybrid]") {
    FusionConfig config;
    config.n_draws = 90'000;

    SECTION("all components agreeing on one doc returns just it") {
        const auto fused = hybrid23(list_of("a", {"X"}), list_of("b", {"X"}),
                                    list_of("c", {"X"}), config);
        REQUIRE(fused.size() == 1);
        CHECK(fused.entries[0].id == "X");
        CHECK(fused.entries[0].count == config.n_draws);
        CHECK(fused.source == "hybrid23");
    }

    SECTION("three disjoint singletons split the mass into thirds") {
        const auto fused = hybrid23(list_of("a", {"A"}), list_of("b", {"B"}),
                                    list_of("c", {"C"}), config);
        REQUIRE(fused.size() == 3);
        CHECK(count_sum(fused) == config.n_draws);
        std::vector<std::string> sorted_ids = fused_ids(fused);
        std::sort(sorted_ids.begin(), sorted_ids.end());
        CHECK(sorted_ids == std::vector<std::string>{"A", "B", "C"});
        for (const auto& entry : fused.entries) {
            CHECK(entry.probability == Approx(1.0 / 3.0).margin(1e-15));
        }
        CHECK(std::is_sorted(fused.entries.begin(), fused.entries.end(),
                             [](const FusedEntry& a, const FusedEntry& b) {
                                 return a.count > b.count;
                             }));
    }

    SECTION("the candidate pool never exceeds three times k") {
        FusionConfig tight;
        tight.k = 2;
        tight.n_draws = 10'000;
        const auto fused = hybrid23(list_of("a", {"A", "B", "C"}), list_of("b", {"D", "E", "F"}),
                                    list_of("c", {"G", "H", "I"}), tight);
        // Inputs truncate to 2 each (pool 6), output truncates to k=2.
        CHECK(fused.size() == 2);
    }
}

TEST_CASE("fused scores expose draw frequencies in rank order", "[fusion]") {
    const std::vector<RankedList> lists{list_of("one", {"A", "B"})};
    FusionConfig config;
    config.n_draws = 10'000;
    const auto fused = fuse(lists, config);
    const auto ranked = fused.ranked();
    REQUIRE(ranked.size() == fused.size());
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        CHECK(ranked.entries[i].id == fused.entries[i].id);
        CHECK(ranked.entries[i].score ==
              Approx(static_cast<double>(fused.entries[i].count) / 10'000.0).margin(1e-15));
    }
}

TEST_CASE("ranked and fused lists round-trip through JSON", "[fusion]") {
    const auto list = list_of("bm25", {"A", "B", "C"});
    const auto back = ranked_list_from_json(ranked_list_to_json(list));
    CHECK(back.source == list.source);
    CHECK(back.entries == list.entries);

    const std::vector<RankedList> lists{list, list_of("two", {"B", "D"})};
    FusionConfig config;
    config.n_draws = 25'000;
    const auto fused = fuse(lists, config);
    CHECK(fused_list_from_json(fused_list_to_json(fused)) == fused);

    CHECK_THROWS_AS(ranked_list_from_json("not json"), ConfigError);
    CHECK_THROWS_AS(fused_list_from_json("{}"), ConfigError);
}
