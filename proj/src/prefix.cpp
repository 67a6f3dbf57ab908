#include "probstrat/prefix.hpp"

#include "probstrat/fixpoint.hpp"
#include "probstrat/graph.hpp"
#include "probstrat/grammar.hpp"
#include "probstrat/lifting.hpp"

#include <deque>

namespace probstrat {

int ItemTable::find(const TableItem& it) const {
    auto f = index_.find(it);
    return f == index_.end() ? -1 : f->second;
}

int ItemTable::add(const TableItem& it, bool& fresh) {
    auto [pos, inserted] = index_.emplace(it, static_cast<int>(items.size()));
    fresh = inserted;
    if (inserted) {
        items.push_back(it);
        steps.emplace_back();
    }
    return pos->second;
}

std::string ItemTable::item_text(const Pdt& pdt, int id) const {
    const TableItem& it = items.at(id);
    return std::string(it.inner ? "inner(" : "forward(") + (it.lower == kBottom ? "_|_" : pdt.symbol_name(it.lower)) +
           ", " + pdt.symbol_name(it.upper) + ", " + std::to_string(it.i) + ", " + std::to_string(it.j) + ")";
}

ScanUniformity check_scan_uniformity(const Pdt& pdt) {
    std::vector<int> kinds(pdt.symbol_count(), 0); // bit 1: reads input, bit 2: empty
    for (const Transition& t : pdt.transitions)
        if (t.kind == TransKind::Swap) kinds[t.top] |= t.input >= 0 ? 1 : 2;
    ScanUniformity u;
    for (int s = 0; s < pdt.symbol_count(); ++s)
        if (kinds[s] == 3) u.mixed.push_back(s);
    u.uniform = u.mixed.empty();
    return u;
}

ItemTable derive_items(const Pdt& pdt, const Word& input) {
    if (!is_normal(pdt)) throw Error("derive_items", "NotNormalized", "automaton has shorthand or mixed transitions");
    const int n = static_cast<int>(input.size());
    const int q = pdt.symbol_count();
    std::vector<std::vector<int>> pushes(q), swaps(q);
    std::map<std::pair<int, int>, std::vector<int>> pops; // (below, top)
    for (size_t t = 0; t < pdt.transitions.size(); ++t) {
        const Transition& tr = pdt.transitions[t];
        if (tr.kind == TransKind::Push) pushes[tr.top].push_back(static_cast<int>(t));
        if (tr.kind == TransKind::Swap) swaps[tr.top].push_back(static_cast<int>(t));
        if (tr.kind == TransKind::Pop) pops[{tr.below, tr.top}].push_back(static_cast<int>(t));
    }

    ItemTable table;
    table.input = input;
    std::deque<int> agenda;
    auto derive = [&](const TableItem& it, ItemStep step) {
        bool fresh = false;
        int id = table.add(it, fresh);
        table.steps[id].push_back(step);
        if (fresh) agenda.push_back(id);
    };

    // processed items, indexed for the two-antecedent pop rules
    std::map<std::pair<int, int>, std::vector<int>> ending;      // (upper, j) -> forward or inner items
    std::map<std::pair<int, int>, std::vector<int>> inner_start; // (lower, i) -> inner items

    derive({false, kBottom, pdt.init, 0, 0}, {});
    for (int j = 0; j <= n; ++j)
        for (int x = 0; x < q; ++x)
            for (int t : pushes[x]) derive({true, x, pdt.transitions[t].target, j, j}, {t, -1, -1});

    auto pop_with = [&](int left, int right) {
        const TableItem a = table.items[left];
        const TableItem b = table.items[right];
        auto it = pops.find({a.upper, b.upper});
        if (it == pops.end()) return;
        for (int t : it->second)
            derive({a.inner, a.lower, pdt.transitions[t].target, a.i, b.j}, {t, left, right});
    };

    while (!agenda.empty()) {
        int id = agenda.front();
        agenda.pop_front();
        const TableItem it = table.items[id];
        if (!it.inner)
            for (int t : pushes[it.upper]) derive({false, it.upper, pdt.transitions[t].target, it.j, it.j}, {t, id, -1});
        for (int t : swaps[it.upper]) {
            const Transition& tr = pdt.transitions[t];
            if (tr.input < 0) derive({it.inner, it.lower, tr.target, it.i, it.j}, {t, id, -1});
            else if (it.j < n && input[it.j] == tr.input)
                derive({it.inner, it.lower, tr.target, it.i, it.j + 1}, {t, id, -1});
        }
        ending[{it.upper, it.j}].push_back(id);
        if (it.inner) inner_start[{it.lower, it.i}].push_back(id);
        // as the left antecedent: partners are inner items opened on our top
        auto right = inner_start.find({it.upper, it.j});
        if (right != inner_start.end())
            for (int r : std::vector<int>(right->second)) pop_with(id, r);
        // as the right antecedent (inner only): partners end with our lower symbol
        if (it.inner) {
            auto left = ending.find({it.lower, it.i});
            if (left != ending.end())
                for (int l : std::vector<int>(left->second))
                    if (l != id) pop_with(l, id);
        }
    }
    return table;
}

void solve_item_probabilities(ItemTable& table, const Ppdt& a, double tolerance, int max_iter) {
    const int m = static_cast<int>(table.items.size());
    std::vector<std::vector<int>> deps(m);
    for (int i = 0; i < m; ++i)
        for (const ItemStep& s : table.steps[i]) {
            if (s.first >= 0) deps[i].push_back(s.first);
            if (s.second >= 0) deps[i].push_back(s.second);
        }
    auto scc = strongly_connected_components(deps);
    table.value.assign(m, Prob(0));
    table.exact = true;
    auto step_weight = [&](const ItemStep& s) { return s.transition < 0 ? Prob(1) : a.prob[s.transition]; };
    for (size_t c = 0; c < scc.components.size(); ++c) {
        const auto& comp = scc.components[c];
        if (!scc.cyclic[c]) {
            int id = comp[0];
            Prob sum(0);
            for (const ItemStep& s : table.steps[id]) {
                Prob term = step_weight(s);
                if (s.first >= 0) term *= table.value[s.first];
                if (s.second >= 0) term *= table.value[s.second];
                sum += term;
            }
            table.value[id] = sum;
            continue;
        }
        table.exact = false;
        std::vector<int> local(m, -1);
        for (size_t i = 0; i < comp.size(); ++i) local[comp[i]] = static_cast<int>(i);
        PolySystem sys;
        sys.equations.resize(comp.size());
        for (size_t i = 0; i < comp.size(); ++i)
            for (const ItemStep& s : table.steps[comp[i]]) {
                Term term;
                term.coef = step_weight(s).to_double();
                for (int ante : {s.first, s.second}) {
                    if (ante < 0) continue;
                    if (local[ante] >= 0) term.vars.push_back(local[ante]);
                    else term.coef *= table.value[ante].to_double();
                }
                sys.equations[i].push_back(std::move(term));
            }
        auto fp = least_fixpoint(sys, tolerance, max_iter);
        if (!fp.converged) throw NonConvergence("solve_item_probabilities", fp.values, fp.last_change);
        for (size_t i = 0; i < comp.size(); ++i) table.value[comp[i]] = Prob::approx(fp.values[i]);
    }
    table.solved = true;
}

Prob string_probability_ppdt(const Ppdt& a, const Word& w, double tolerance, int max_iter) {
    ItemTable table = derive_items(a.pdt, w);
    solve_item_probabilities(table, a, tolerance, max_iter);
    int id = table.find({false, kBottom, a.pdt.final, 0, static_cast<int>(w.size())});
    return id < 0 ? Prob(0) : table.value[id];
}

PrefixResult prefix_probability(const Ppdt& a, const Word& w, const PrefixOptions& opt) {
    const std::string op = "prefix_probability";
    auto u = check_scan_uniformity(a.pdt);
    if (!u.uniform)
        throw Error(op, "ScanUniformityViolation",
                    "symbol " + a.pdt.symbol_name(u.mixed[0]) + " has both reading and empty swaps");
    PrefixResult res;
    if (!opt.assume_consistent) {
        try {
            auto verdict = is_consistent(ppda_to_pcfg(a), std::max(opt.tolerance, 1e-9), opt.max_iter);
            if (!verdict.consistent)
                throw Error(op, "NotConsistent", "total mass " + verdict.z_start.str());
        } catch (const Error& e) {
            if (e.kind() == "NotConsistent") throw;
            res.warnings.push_back(std::string("NotVerifiedConsistent: ") + e.what());
        }
    }
    std::vector<bool> scans(a.pdt.symbol_count(), false);
    for (const Transition& t : a.pdt.transitions)
        if (t.kind == TransKind::Swap && t.input >= 0) scans[t.top] = true;

    ItemTable table = derive_items(a.pdt, w);
    solve_item_probabilities(table, a, opt.tolerance, opt.max_iter);
    const int n = static_cast<int>(w.size());
    Prob sum(0);
    for (size_t id = 0; id < table.items.size(); ++id) {
        const TableItem& it = table.items[id];
        if (it.inner || it.j != n) continue;
        bool complete = it.lower == kBottom && it.upper == a.pdt.final && it.i == 0;
        if (complete || scans[it.upper]) sum += table.value[id];
    }
    res.value = sum;
    return res;
}

} // namespace probstrat
