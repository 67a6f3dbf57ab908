#include "probstrat/properties.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <unordered_map>

namespace probstrat {

namespace {

unsigned long long pair_key(int a, int b) {
    return (static_cast<unsigned long long>(static_cast<unsigned>(a)) << 32) | static_cast<unsigned>(b);
}

struct Index {
    std::vector<std::vector<int>> swaps_from, swaps_to, pushes_from, pushes_to, pops_to, pops_top;
    std::unordered_map<unsigned long long, std::vector<int>> pops_by; // (below, top) -> pop ids

    explicit Index(const Pdt& pdt)
        : swaps_from(pdt.symbol_count()), swaps_to(pdt.symbol_count()), pushes_from(pdt.symbol_count()),
          pushes_to(pdt.symbol_count()), pops_to(pdt.symbol_count()), pops_top(pdt.symbol_count()) {
        for (size_t i = 0; i < pdt.transitions.size(); ++i) {
            const Transition& t = pdt.transitions[i];
            int id = static_cast<int>(i);
            switch (t.kind) {
            case TransKind::Swap:
                swaps_from[t.top].push_back(id);
                swaps_to[t.target].push_back(id);
                break;
            case TransKind::Push:
                pushes_from[t.top].push_back(id);
                pushes_to[t.target].push_back(id);
                break;
            case TransKind::Pop:
                pops_to[t.target].push_back(id);
                pops_top[t.top].push_back(id);
                pops_by[pair_key(t.below, t.top)].push_back(id);
                break;
            default: throw Error("properties", "NotNormalized", "shorthand transition " + pdt.transition_text(id));
            }
        }
    }

    const std::vector<int>& pops(int below, int top) const {
        static const std::vector<int> none;
        auto it = pops_by.find(pair_key(below, top));
        return it == pops_by.end() ? none : it->second;
    }
};

} // namespace

LeadsTo leadsto_relation(const Pdt& pdt) {
    const int n = pdt.symbol_count();
    Index idx(pdt);
    LeadsTo lt(n);
    std::vector<std::vector<int>> rev(n), summary(n);
    std::set<std::pair<int, int>> summary_seen;
    std::deque<std::pair<int, int>> work;

    auto insert = [&](int y, int z) {
        if (lt.insert(y, z)) {
            rev[z].push_back(y);
            work.emplace_back(y, z);
        }
    };
    for (int y = 0; y < n; ++y) insert(y, y);

    while (!work.empty()) {
        auto [y, z] = work.front();
        work.pop_front();
        for (int t : idx.swaps_from[z]) insert(y, pdt.transitions[t].target);
        for (size_t i = 0; i < summary[z].size(); ++i) insert(y, summary[z][i]);
        // y was pushed on some x and has become z: each matching pop is a summary edge x -> v
        for (int p : idx.pushes_to[y]) {
            int x = pdt.transitions[p].top;
            for (int q : idx.pops(x, z)) {
                int v = pdt.transitions[q].target;
                if (!summary_seen.insert({x, v}).second) continue;
                summary[x].push_back(v);
                for (size_t i = 0; i < rev[x].size(); ++i) insert(rev[x][i], v);
            }
        }
    }
    return lt;
}

std::vector<int> matching_pops(const Pdt& pdt, const LeadsTo& lt, int push) {
    const Transition& t = pdt.transitions.at(push);
    std::vector<int> out;
    for (size_t i = 0; i < pdt.transitions.size(); ++i) {
        const Transition& q = pdt.transitions[i];
        if (q.kind == TransKind::Pop && q.below == t.top && lt.holds(t.target, q.top))
            out.push_back(static_cast<int>(i));
    }
    return out;
}

SppReport check_spp(const Pdt& pdt) {
    SppReport rep;
    Index idx(pdt);
    LeadsTo lt = leadsto_relation(pdt);
    for (size_t i = 0; i < pdt.transitions.size(); ++i) {
        const Transition& t = pdt.transitions[i];
        if (t.kind != TransKind::Push) continue;
        std::vector<int> pops;
        for (int y2 : lt.targets(t.target))
            for (int q : idx.pops(t.top, y2)) pops.push_back(q);
        std::sort(pops.begin(), pops.end());
        int first = -1;
        std::set<int> reported;
        for (int q : pops) {
            int z = pdt.transitions[q].target;
            if (first < 0) { first = q; continue; }
            if (z != pdt.transitions[first].target && reported.insert(z).second) {
                rep.holds = false;
                rep.violations.push_back({static_cast<int>(i), first, q});
            }
        }
    }
    return rep;
}

void SurfaceAutomaton::finish() {
    auto tidy = [](std::vector<int>& v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    for (auto& v : start_) tidy(v);
    for (auto& m : edges_)
        for (auto& [sym, v] : m) tidy(v);
}

const std::vector<int>& SurfaceAutomaton::next(int state, int symbol) const {
    static const std::vector<int> none;
    const auto& m = edges_.at(state);
    auto it = m.find(symbol);
    return it == m.end() ? none : it->second;
}

bool SurfaceAutomaton::accepts(const std::vector<int>& stack) const {
    if (stack.empty()) return false;
    std::vector<int> cur = start(stack.back());
    for (size_t i = stack.size() - 1; i-- > 0 && !cur.empty();) {
        std::vector<int> nxt;
        for (int s : cur) {
            const auto& v = next(s, stack[i]);
            nxt.insert(nxt.end(), v.begin(), v.end());
        }
        std::sort(nxt.begin(), nxt.end());
        nxt.erase(std::unique(nxt.begin(), nxt.end()), nxt.end());
        cur.swap(nxt);
    }
    return std::any_of(cur.begin(), cur.end(), [&](int s) { return accepting(s); });
}

SurfaceAutomaton reachable_stacks(const Pdt& pdt, const LeadsTo& lt) {
    const int n = pdt.symbol_count();
    SurfaceAutomaton a(n, n);
    for (int y = 0; y < n; ++y) a.add_start(y, y);
    for (const Transition& t : pdt.transitions) {
        if (t.kind != TransKind::Push) continue;
        for (int y : lt.targets(t.target)) a.add_edge(y, t.top, t.top);
    }
    for (int y : lt.targets(pdt.init)) a.set_accepting(y);
    a.finish();
    return a;
}

SurfaceAutomaton live_stacks(const Pdt& pdt, const LeadsTo& lt) {
    const int n = pdt.symbol_count();
    Index idx(pdt);
    SurfaceAutomaton a(n, n);
    for (int y = 0; y < n; ++y) {
        a.add_start(y, y);
        if (lt.holds(y, pdt.final)) a.set_accepting(y);
        for (int t : lt.targets(y))
            for (int q : idx.pops_top[t]) a.add_edge(y, pdt.transitions[q].below, pdt.transitions[q].target);
    }
    a.finish();
    return a;
}

std::optional<std::vector<int>> uncovered_stack(const Pdt& pdt, const SurfaceAutomaton& a,
                                                const SurfaceAutomaton& b) {
    struct Node {
        int sa;
        std::vector<int> sb;
        int parent;
        int symbol;
    };
    std::vector<Node> nodes;
    std::set<std::pair<int, std::vector<int>>> seen;
    auto add = [&](int sa, std::vector<int> sb, int parent, int symbol) {
        std::sort(sb.begin(), sb.end());
        sb.erase(std::unique(sb.begin(), sb.end()), sb.end());
        if (!seen.insert({sa, sb}).second) return;
        nodes.push_back({sa, std::move(sb), parent, symbol});
    };
    for (int y = 0; y < pdt.symbol_count(); ++y)
        for (int sa : a.start(y)) add(sa, b.start(y), -1, y);
    for (size_t i = 0; i < nodes.size(); ++i) {
        const int sa = nodes[i].sa;
        if (a.accepting(sa) &&
            std::none_of(nodes[i].sb.begin(), nodes[i].sb.end(), [&](int s) { return b.accepting(s); })) {
            // walking back from the lowest symbol read gives the stack bottom first
            std::vector<int> stack;
            for (int k = static_cast<int>(i); k >= 0; k = nodes[k].parent) stack.push_back(nodes[k].symbol);
            return stack;
        }
        for (const auto& [sym, nexts] : a.edges(sa)) {
            std::vector<int> sb;
            for (int s : nodes[i].sb) {
                const auto& v = b.next(s, sym);
                sb.insert(sb.end(), v.begin(), v.end());
            }
            for (int na : nexts) add(na, sb, static_cast<int>(i), sym);
        }
    }
    return std::nullopt;
}

CppReport check_cpp(const Pdt& pdt, int bound) {
    CppReport rep;
    LeadsTo lt = leadsto_relation(pdt);
    auto post = reachable_stacks(pdt, lt);
    auto pre = live_stacks(pdt, lt);
    auto dead = uncovered_stack(pdt, post, pre);
    if (!dead) return rep;
    rep.holds = false;
    rep.dead_stack = *dead;

    // breadth-first over stacks; the first dead one ends a shortest dead computation
    if (bound <= 0) bound = 10 * pdt.symbol_count();
    const size_t node_limit = 200000;
    struct Node {
        std::vector<int> stack;
        int parent;
        int via;
        int depth;
    };
    std::vector<Node> nodes{{{pdt.init}, -1, -1, 0}};
    std::set<std::vector<int>> seen{{pdt.init}};
    std::vector<std::vector<int>> by_top(pdt.symbol_count());
    for (size_t i = 0; i < pdt.transitions.size(); ++i) by_top[pdt.transitions[i].top].push_back(static_cast<int>(i));
    for (size_t i = 0; i < nodes.size(); ++i) {
        if (!pre.accepts(nodes[i].stack)) {
            DeadWitness w;
            w.stack = nodes[i].stack;
            for (int k = static_cast<int>(i); nodes[k].parent >= 0; k = nodes[k].parent)
                w.computation.steps.push_back(nodes[k].via);
            std::reverse(w.computation.steps.begin(), w.computation.steps.end());
            for (int t : w.computation.steps)
                if (pdt.transitions[t].input >= 0) w.input.push_back(pdt.transitions[t].input);
            rep.witness = std::move(w);
            return rep;
        }
        if (nodes[i].depth >= bound) continue;
        const std::vector<int> st = nodes[i].stack;
        for (int id : by_top[st.back()]) {
            const Transition& t = pdt.transitions[id];
            std::vector<int> next = st;
            if (t.kind == TransKind::Push) {
                next.push_back(t.target);
            } else if (t.kind == TransKind::Pop) {
                if (st.size() < 2 || st[st.size() - 2] != t.below) continue;
                next.pop_back();
                next.back() = t.target;
            } else {
                next.back() = t.target;
            }
            if (!seen.insert(next).second) continue;
            if (nodes.size() >= node_limit) { rep.witness_search_exhausted = true; return rep; }
            nodes.push_back({std::move(next), static_cast<int>(i), id, nodes[i].depth + 1});
        }
    }
    rep.witness_search_exhausted = true;
    return rep;
}

MassReport check_mass_bound(const Ppdt& ppdt, int max_steps) {
    const Pdt& pdt = ppdt.pdt;
    LeadsTo lt = leadsto_relation(pdt);
    auto pre = live_stacks(pdt, lt);
    std::vector<std::vector<int>> by_top(pdt.symbol_count());
    for (size_t i = 0; i < pdt.transitions.size(); ++i) by_top[pdt.transitions[i].top].push_back(static_cast<int>(i));
    MassReport rep;
    rep.sum = Prob(0);
    std::vector<int> stack{pdt.init};
    std::function<void(int, const Prob&)> dfs = [&](int steps, const Prob& p) {
        if (stack.size() == 1 && stack[0] == pdt.final) {
            rep.sum += p;
            ++rep.complete;
            return;
        }
        if (!pre.accepts(stack)) {
            rep.sum += p;
            ++rep.dead;
            return;
        }
        if (steps >= max_steps) return;
        for (int id : by_top[stack.back()]) {
            const Transition& t = pdt.transitions[id];
            int top = stack.back();
            if (t.kind == TransKind::Push) {
                stack.push_back(t.target);
                dfs(steps + 1, p * ppdt.prob[id]);
                stack.pop_back();
            } else if (t.kind == TransKind::Pop) {
                if (stack.size() < 2 || stack[stack.size() - 2] != t.below) continue;
                int under = stack[stack.size() - 2];
                stack.pop_back();
                stack.back() = t.target;
                dfs(steps + 1, p * ppdt.prob[id]);
                stack.back() = under;
                stack.push_back(top);
            } else {
                stack.back() = t.target;
                dfs(steps + 1, p * ppdt.prob[id]);
                stack.back() = top;
            }
        }
    };
    dfs(0, Prob(1));
    rep.within_bound = rep.sum <= Prob(1);
    return rep;
}

std::vector<bool> useful_transitions(const Pdt& pdt, const LeadsTo& lt) {
    Index idx(pdt);
    std::vector<bool> used(pdt.transitions.size(), false);
    if (!lt.holds(pdt.init, pdt.final)) return used;
    std::unordered_set<unsigned long long> needed;
    std::deque<std::pair<int, int>> work;
    auto need = [&](int y, int t) {
        if (needed.insert(pair_key(y, t)).second) work.emplace_back(y, t);
    };
    need(pdt.init, pdt.final);
    while (!work.empty()) {
        auto [y, t] = work.front();
        work.pop_front();
        for (int s : idx.swaps_to[t]) {
            int z = pdt.transitions[s].top;
            if (!lt.holds(y, z)) continue;
            used[s] = true;
            need(y, z);
        }
        for (int q : idx.pops_to[t]) {
            const Transition& pop = pdt.transitions[q];
            int z = pop.below, w2 = pop.top;
            if (!lt.holds(y, z)) continue;
            for (int p : idx.pushes_from[z]) {
                int w = pdt.transitions[p].target;
                if (!lt.holds(w, w2)) continue;
                used[p] = used[q] = true;
                need(y, z);
                need(w, w2);
            }
        }
    }
    return used;
}

ReducedReport is_reduced_pdt(const Pdt& pdt) {
    ReducedReport rep;
    auto used = useful_transitions(pdt, leadsto_relation(pdt));
    for (size_t i = 0; i < used.size(); ++i)
        if (!used[i]) rep.unused.push_back(static_cast<int>(i));
    rep.reduced = rep.unused.empty();
    return rep;
}

Pdt trim_pdt(const Pdt& pdt) {
    LeadsTo lt = leadsto_relation(pdt);
    if (!lt.holds(pdt.init, pdt.final)) throw Error("trim_pdt", "EmptyLanguage", "no complete computation exists");
    auto used = useful_transitions(pdt, lt);
    std::vector<bool> keep(pdt.symbol_count(), false);
    keep[pdt.init] = keep[pdt.final] = true;
    for (size_t i = 0; i < used.size(); ++i) {
        if (!used[i]) continue;
        const Transition& t = pdt.transitions[i];
        keep[t.top] = keep[t.target] = true;
        if (t.below >= 0) keep[t.below] = true;
    }
    Pdt out(pdt.input_alphabet, pdt.rule_alphabet);
    std::vector<int> map(pdt.symbol_count(), -1);
    for (int s = 0; s < pdt.symbol_count(); ++s)
        if (keep[s]) map[s] = out.intern(pdt.symbol_name(s));
    out.init = map[pdt.init];
    out.final = map[pdt.final];
    for (size_t i = 0; i < used.size(); ++i) {
        if (!used[i]) continue;
        Transition t = pdt.transitions[i];
        t.top = map[t.top];
        t.target = map[t.target];
        if (t.below >= 0) t.below = map[t.below];
        out.add(std::move(t));
    }
    return out;
}

} // namespace probstrat
