#include "probstrat/graph.hpp"

#include <algorithm>

namespace probstrat {

SccResult strongly_connected_components(const std::vector<std::vector<int>>& adj) {
    const int n = static_cast<int>(adj.size());
    SccResult res;
    res.component_of.assign(n, -1);
    std::vector<int> index(n, -1), low(n, 0), stack;
    std::vector<bool> on_stack(n, false);
    int counter = 0;

    // iterative Tarjan; recursion depth would otherwise follow item chains
    struct Frame { int v; size_t edge; };
    std::vector<Frame> call;
    for (int root = 0; root < n; ++root) {
        if (index[root] != -1) continue;
        call.push_back({root, 0});
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            Frame& f = call.back();
            if (f.edge < adj[f.v].size()) {
                int w = adj[f.v][f.edge++];
                if (index[w] == -1) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
                continue;
            }
            int v = f.v;
            call.pop_back();
            if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
            if (low[v] != index[v]) continue;
            std::vector<int> comp;
            int w;
            do {
                w = stack.back();
                stack.pop_back();
                on_stack[w] = false;
                res.component_of[w] = static_cast<int>(res.components.size());
                comp.push_back(w);
            } while (w != v);
            bool cyc = comp.size() > 1;
            if (!cyc)
                cyc = std::find(adj[v].begin(), adj[v].end(), v) != adj[v].end();
            res.components.push_back(std::move(comp));
            res.cyclic.push_back(cyc);
        }
    }
    return res;
}

} // namespace probstrat
