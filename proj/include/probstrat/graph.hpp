#pragma once

#include <vector>

namespace probstrat {

// Strongly connected components of a directed graph given as adjacency
// lists. Components come out in reverse topological order: every edge
// u -> v has comp(v) emitted no later than comp(u), so callers can solve
// dependencies first.
struct SccResult {
    std::vector<std::vector<int>> components;
    std::vector<int> component_of;
    std::vector<bool> cyclic; // component has >1 node or a self-loop
};

SccResult strongly_connected_components(const std::vector<std::vector<int>>& adj);

} // namespace probstrat
