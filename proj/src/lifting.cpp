#include "probstrat/lifting.hpp"

#include "probstrat/properties.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <set>

namespace probstrat {

namespace {

// For each push: the common target of its matching pops, or -1 when the
// push is never matched. Throws SppRequired on two different targets.
std::vector<int> pop_targets(const Pdt& pdt, const std::string& op) {
    LeadsTo lt = leadsto_relation(pdt);
    std::vector<int> out(pdt.transitions.size(), -1);
    for (size_t t = 0; t < pdt.transitions.size(); ++t) {
        if (pdt.transitions[t].kind != TransKind::Push) continue;
        for (int pop : matching_pops(pdt, lt, static_cast<int>(t))) {
            int z = pdt.transitions[pop].target;
            if (out[t] >= 0 && out[t] != z)
                throw Error(op, "SppRequired",
                            "push " + pdt.transition_text(static_cast<int>(t)) + " returns to both " +
                                pdt.symbol_name(out[t]) + " and " + pdt.symbol_name(z));
            out[t] = z;
        }
    }
    return out;
}

Prob rule_product(const Output& out, const std::vector<Prob>* rule_prob) {
    Prob p(1);
    if (!rule_prob) return p;
    for (const OutSym& o : out)
        if (o.kind == OutKind::Rule) p *= (*rule_prob)[o.value];
    return p;
}

WeightedCfg induced_grammar(const Pdt& pdt, const std::vector<Prob>* rule_prob, const std::string& op) {
    if (!is_normal(pdt)) throw Error(op, "NotNormalized", "automaton has shorthand or mixed transitions");
    auto targets = pop_targets(pdt, op);
    WeightedCfg w;
    Cfg& g = w.cfg;
    g.terminals = pdt.input_alphabet;
    g.nonterminals = pdt.symbols();
    g.start = pdt.init;
    auto nt = [](int s) { return Sym{SymKind::Nonterminal, s}; };
    std::vector<bool> ends(pdt.symbol_count(), false);
    ends[pdt.final] = true;
    for (size_t t = 0; t < pdt.transitions.size(); ++t) {
        const Transition& tr = pdt.transitions[t];
        std::string id = "t" + std::to_string(t);
        switch (tr.kind) {
        case TransKind::Push:
            if (targets[t] < 0) break;
            g.rules.push_back(Rule{id, tr.top, {nt(tr.target), nt(targets[t])}});
            w.weight.push_back(Prob(1));
            break;
        case TransKind::Swap: {
            Rule r{id, tr.top, {}};
            if (tr.input >= 0) r.rhs.push_back(Sym{SymKind::Terminal, tr.input});
            r.rhs.push_back(nt(tr.target));
            g.rules.push_back(std::move(r));
            w.weight.push_back(rule_product(tr.output, rule_prob));
            break;
        }
        case TransKind::Pop: ends[tr.top] = true; break;
        default: break;
        }
    }
    for (int s = 0; s < pdt.symbol_count(); ++s)
        if (ends[s]) {
            g.rules.push_back(Rule{"e" + std::to_string(s), s, {}});
            w.weight.push_back(Prob(1));
        }
    return w;
}

} // namespace

WeightedCfg pdt_to_weighted_cfg(const Pdt& pdt, const std::vector<Prob>* rule_prob) {
    return induced_grammar(pdt, rule_prob, "pdt_to_weighted_cfg");
}

Lifted lift_pdt(const Pcfg& g, const Pdt& pdt, double tolerance, int max_iter) {
    const std::string op = "lift";
    if (!is_proper(g, 1e-12)) throw Error(op, "NotProper", "rule probabilities do not sum to one per nonterminal");
    auto cpp = check_cpp(pdt);
    if (!cpp.holds) {
        std::string stack;
        for (int s : cpp.dead_stack) stack += (stack.empty() ? "" : " ") + pdt.symbol_name(s);
        throw Error(op, "CppRequired", "dead stack " + stack);
    }
    // rule probabilities in the automaton's output numbering
    std::vector<Prob> rp;
    for (const std::string& id : pdt.rule_alphabet) {
        int r = g.cfg.rule_index(id);
        if (r < 0) throw Error(op, "UnknownRule", id);
        rp.push_back(g.prob[r]);
    }
    auto targets = pop_targets(pdt, op);
    WeightedCfg w = induced_grammar(pdt, &rp, op);
    auto pf = partition_functions(w, tolerance, max_iter);

    Lifted out;
    out.z = pf.z;
    out.exact = pf.exact;
    out.ppdt.pdt = pdt;
    auto ratio = [&](Prob num, int x) { return pf.z[x].is_zero() ? Prob(0) : num / pf.z[x]; };
    for (size_t t = 0; t < pdt.transitions.size(); ++t) {
        const Transition& tr = pdt.transitions[t];
        switch (tr.kind) {
        case TransKind::Swap: out.ppdt.prob.push_back(ratio(rule_product(tr.output, &rp) * pf.z[tr.target], tr.top)); break;
        case TransKind::Push:
            out.ppdt.prob.push_back(targets[t] < 0 ? Prob(0) : ratio(pf.z[tr.target] * pf.z[targets[t]], tr.top));
            break;
        default: out.ppdt.prob.push_back(Prob(1)); break;
        }
    }
    return out;
}

Lifted lift(const Pcfg& g, StrategyKind kind, double tolerance, int max_iter) {
    return lift_pdt(g, construct(kind, g.cfg), tolerance, max_iter);
}

Pcfg ppda_to_pcfg(const Ppdt& a) {
    WeightedCfg w = induced_grammar(a.pdt, nullptr, "ppda_to_pcfg");
    Cfg g = w.cfg;
    std::map<std::string, Prob> prob;
    for (const Rule& r : g.rules)
        prob[r.id] = r.id[0] == 't' ? a.prob[std::stoi(r.id.substr(1))] : Prob(1);
    auto start_rules = g.rules_of(g.start);
    if (start_rules.size() != 1 || g.rules[start_rules[0]].rhs.empty()) {
        std::string name = g.nonterminals[g.start] + "'";
        while (g.nonterminal_index(name) >= 0) name += "'";
        g.nonterminals.push_back(name);
        int s = static_cast<int>(g.nonterminals.size()) - 1;
        g.rules.push_back(Rule{"start", s, {Sym{SymKind::Nonterminal, g.start}}});
        g.start = s;
        prob["start"] = Prob(1);
    }
    Pcfg out;
    out.cfg = reduce(g);
    for (const Rule& r : out.cfg.rules) out.prob.push_back(prob.at(r.id));
    return out;
}

// ---------------------------------------------------------------- feasibility

FeasibilityVerdict feasibility_analysis(const Pcfg& g, StrategyKind kind, const std::vector<Word>& probes,
                                        int max_steps) {
    const std::string op = "feasibility_analysis";
    if (probes.size() < 2 || probes.size() % 2) throw Error(op, "BadProbes", "probe strings come in pairs");
    Pdt pdt = construct(kind, g.cfg);
    auto groups = transition_groups(pdt);
    std::vector<bool> forced(pdt.transitions.size());
    FeasibilityVerdict v;
    for (size_t t = 0; t < forced.size(); ++t) {
        forced[t] = groups.groups[groups.group_of[t]].size() == 1;
        if (forced[t]) v.forced_transitions.push_back(static_cast<int>(t));
    }
    std::vector<ProbMonomial> mono;
    std::vector<Rational> gp;
    for (const Word& w : probes) {
        auto ms = symbolic_string_probability(pdt, w, max_steps);
        if (ms.empty()) throw Error(op, "NoComputation", "'" + word_text(g.cfg, w) + "' is not accepted");
        if (ms.size() > 1)
            throw Error(op, "AmbiguousProbe", "'" + word_text(g.cfg, w) + "' has " + std::to_string(ms.size()) +
                                                  " computations");
        mono.push_back(ms[0]);
        Prob p = string_probability_cfg(g, w, max_steps);
        if (!p.exact()) throw Error(op, "InexactGrammar", "rule probabilities must be exact");
        if (p.is_zero()) throw Error(op, "ZeroProbe", "'" + word_text(g.cfg, w) + "' has probability 0");
        gp.push_back(p.rational());
    }
    std::map<std::pair<ProbMonomial, ProbMonomial>, size_t> seen;
    for (size_t i = 0; i + 1 < probes.size(); i += 2) {
        ProbeRatio r{probes[i], probes[i + 1], gp[i] / gp[i + 1], {}, {}};
        std::set<int> ids;
        for (auto& [t, c] : mono[i]) ids.insert(t);
        for (auto& [t, c] : mono[i + 1]) ids.insert(t);
        for (int t : ids) {
            if (forced[t]) continue;
            int c = (mono[i].count(t) ? mono[i].at(t) : 0) - (mono[i + 1].count(t) ? mono[i + 1].at(t) : 0);
            if (c > 0) r.numerator[t] = c;
            if (c < 0) r.denominator[t] = -c;
        }
        std::string pair_text = "'" + word_text(g.cfg, r.first) + "' / '" + word_text(g.cfg, r.second) + "'";
        if (r.forced() && r.grammar_ratio != 1)
            v.conflicts.push_back(pair_text + ": grammar ratio " + to_string(r.grammar_ratio) +
                                  ", forced automaton ratio 1");
        // same residual (or its inverse) must meet the same grammar ratio
        auto key = std::make_pair(r.numerator, r.denominator);
        auto inv = std::make_pair(r.denominator, r.numerator);
        Rational want = r.grammar_ratio;
        auto it = seen.find(key);
        if (it == seen.end()) {
            it = seen.find(inv);
            want = 1 / r.grammar_ratio;
        }
        if (!r.forced() && it != seen.end()) {
            const ProbeRatio& o = v.ratios[it->second];
            if (o.grammar_ratio != want)
                v.conflicts.push_back(pair_text + " and '" + word_text(g.cfg, o.first) + "' / '" +
                                      word_text(g.cfg, o.second) + "' reduce to the same automaton ratio " +
                                      monomial_text(pdt, o.numerator) + " / " + monomial_text(pdt, o.denominator) +
                                      " but need " + to_string(r.grammar_ratio) + " and " +
                                      to_string(o.grammar_ratio));
        }
        if (it == seen.end()) seen.emplace(key, v.ratios.size());
        v.ratios.push_back(std::move(r));
    }
    v.infeasible = !v.conflicts.empty();
    if (v.infeasible) {
        v.explanation =
            "A proper probability assignment gives 1 to every transition that is the only choice for its top "
            "symbol(s); after cancelling transitions shared by both strings of a pair, the automaton's ratio "
            "depends only on the remaining free transitions, and no choice of them meets the grammar's ratios.";
        if (v.ratios.size() > 1 && !v.ratios[0].forced())
            v.explanation +=
                " A distinct ratio for every n would need the common stack symbol to be split into a distinct "
                "copy per n, so no automaton with finitely many stack symbols mapping onto this one can help.";
    } else {
        v.explanation = "not refuted by these probes";
    }
    return v;
}

GridResult grid_search(const Pdt& pdt, const std::vector<ProbMonomial>& probes, const std::vector<double>& targets,
                       double step, double tol, long limit) {
    auto groups = transition_groups(pdt);
    std::set<int> used;
    for (const auto& m : probes)
        for (auto& [t, c] : m) used.insert(t);
    struct Free {
        std::vector<int> members; // those occurring in some probe
        bool rest = false;        // other members can absorb leftover mass
        int absorb = -1;
    };
    std::vector<Free> free;
    std::set<int> seen_groups;
    for (int t : used) {
        int gi = groups.group_of[t];
        if (!seen_groups.insert(gi).second) continue;
        const auto& members = groups.groups[gi];
        if (members.size() == 1) continue;
        Free f;
        for (int m : members) {
            if (used.count(m)) f.members.push_back(m);
            else if (f.absorb < 0) f.absorb = m;
        }
        f.rest = f.absorb >= 0;
        free.push_back(f);
    }
    GridResult res;
    res.free_groups = static_cast<int>(free.size());
    const int steps = static_cast<int>(std::lround(1.0 / step));
    std::vector<double> p(pdt.transitions.size(), 1.0);
    auto check = [&]() {
        ++res.assignments;
        for (size_t i = 0; i < probes.size(); ++i) {
            double v = 1.0;
            for (auto& [t, c] : probes[i]) v *= std::pow(p[t], c);
            if (std::abs(v - targets[i]) > tol) return false;
        }
        return true;
    };
    // depth-first over groups, then over members within a group
    std::function<bool(size_t, size_t, int)> go = [&](size_t gi, size_t mi, int left) -> bool {
        if (res.assignments >= limit) return false;
        if (gi == free.size()) return check();
        Free& f = free[gi];
        if (mi + 1 == f.members.size() && !f.rest) {
            p[f.members[mi]] = left * step;
            return go(gi + 1, 0, steps);
        }
        if (mi == f.members.size()) {
            p[f.absorb] = left * step;
            return go(gi + 1, 0, steps);
        }
        for (int k = 0; k <= left; ++k) {
            p[f.members[mi]] = k * step;
            if (go(gi, mi + 1, left - k)) return true;
        }
        return false;
    };
    if (go(0, 0, steps)) {
        std::vector<Prob> full;
        for (double x : p) full.push_back(Prob::approx(x));
        res.match = std::move(full);
    }
    return res;
}

} // namespace probstrat
