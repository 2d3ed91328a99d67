#pragma once

#include <string>
#include <vector>

namespace citerec {

struct ScoredDoc {
    std::string id;
    double score = 0.0;

    bool operator==(const ScoredDoc&) const = default;
};

// Ordered recommendations from one component algorithm: entries sorted by
// descending score, ties broken by ascending doc id, ids unique.
struct RankedList {
    std::string source;
    std::vector<ScoredDoc> entries;

    bool empty() const { return entries.empty(); }
    std::size_t size() const { return entries.size(); }
};

}  // namespace citerec
