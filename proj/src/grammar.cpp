#include "probstrat/grammar.hpp"

#include "probstrat/fixpoint.hpp"
#include "probstrat/graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace probstrat {

int Cfg::terminal_index(const std::string& name) const {
    auto it = std::find(terminals.begin(), terminals.end(), name);
    return it == terminals.end() ? -1 : static_cast<int>(it - terminals.begin());
}

int Cfg::nonterminal_index(const std::string& name) const {
    auto it = std::find(nonterminals.begin(), nonterminals.end(), name);
    return it == nonterminals.end() ? -1 : static_cast<int>(it - nonterminals.begin());
}

int Cfg::rule_index(const std::string& id) const {
    for (size_t r = 0; r < rules.size(); ++r)
        if (rules[r].id == id) return static_cast<int>(r);
    return -1;
}

std::vector<int> Cfg::rules_of(int nonterminal) const {
    std::vector<int> out;
    for (size_t r = 0; r < rules.size(); ++r)
        if (rules[r].lhs == nonterminal) out.push_back(static_cast<int>(r));
    return out;
}

std::string Cfg::symbol_name(Sym s) const {
    return s.terminal() ? terminals.at(s.index) : nonterminals.at(s.index);
}

std::string Cfg::rule_text(int r) const {
    const Rule& rule = rules.at(r);
    std::string s = nonterminals.at(rule.lhs) + " ->";
    if (rule.rhs.empty()) return s + " eps";
    for (Sym x : rule.rhs) s += " " + symbol_name(x);
    return s;
}

size_t Cfg::size() const {
    size_t n = 0;
    for (const Rule& r : rules) n += 1 + r.rhs.size();
    return n;
}

int Cfg::nonterminal_arity(int r) const {
    int k = 0;
    for (Sym x : rules.at(r).rhs) k += !x.terminal();
    return k;
}

void check_well_formed(const Cfg& cfg, bool require_unique_start, const std::string& op) {
    const int nt = static_cast<int>(cfg.nonterminals.size());
    const int t = static_cast<int>(cfg.terminals.size());
    if (cfg.start < 0 || cfg.start >= nt) throw Error(op, "IllFormedGrammar", "start symbol undeclared");
    std::set<std::string> ids;
    for (const Rule& r : cfg.rules) {
        if (r.lhs < 0 || r.lhs >= nt) throw Error(op, "IllFormedGrammar", "rule " + r.id + " has bad lhs");
        for (Sym x : r.rhs) {
            int lim = x.terminal() ? t : nt;
            if (x.index < 0 || x.index >= lim)
                throw Error(op, "IllFormedGrammar", "rule " + r.id + " uses an undeclared symbol");
        }
        if (!ids.insert(r.id).second) throw Error(op, "IllFormedGrammar", "duplicate rule id " + r.id);
    }
    if (require_unique_start) {
        auto starts = cfg.rules_of(cfg.start);
        if (starts.size() != 1)
            throw Error(op, "IllFormedGrammar",
                        "start symbol " + cfg.nonterminals[cfg.start] + " must have exactly one rule");
        if (cfg.rules[starts[0]].rhs.empty())
            throw Error(op, "IllFormedGrammar", "start rule must have a non-empty right-hand side");
    }
}

namespace {

std::vector<bool> productive(const Cfg& cfg) {
    std::vector<bool> prod(cfg.nonterminals.size(), false);
    bool changed = true;
    while (changed) {
        changed = false;
        for (const Rule& r : cfg.rules) {
            if (prod[r.lhs]) continue;
            bool ok = std::all_of(r.rhs.begin(), r.rhs.end(),
                                  [&](Sym x) { return x.terminal() || prod[x.index]; });
            if (ok) { prod[r.lhs] = true; changed = true; }
        }
    }
    return prod;
}

std::vector<bool> reachable(const Cfg& cfg, const std::vector<bool>& rule_alive) {
    std::vector<bool> reach(cfg.nonterminals.size(), false);
    reach[cfg.start] = true;
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t i = 0; i < cfg.rules.size(); ++i) {
            const Rule& r = cfg.rules[i];
            if (!rule_alive[i] || !reach[r.lhs]) continue;
            for (Sym x : r.rhs)
                if (!x.terminal() && !reach[x.index]) { reach[x.index] = true; changed = true; }
        }
    }
    return reach;
}

// Keeps the selected rules and renumbers symbol tables to the symbols they use.
Cfg restrict_rules(const Cfg& cfg, const std::vector<bool>& keep) {
    std::vector<int> nt_map(cfg.nonterminals.size(), -1), t_map(cfg.terminals.size(), -1);
    nt_map[cfg.start] = 0;
    for (size_t i = 0; i < cfg.rules.size(); ++i) {
        if (!keep[i]) continue;
        nt_map[cfg.rules[i].lhs] = 0;
        for (Sym x : cfg.rules[i].rhs) (x.terminal() ? t_map : nt_map)[x.index] = 0;
    }
    Cfg out;
    for (size_t i = 0; i < cfg.nonterminals.size(); ++i)
        if (nt_map[i] == 0) { nt_map[i] = static_cast<int>(out.nonterminals.size()); out.nonterminals.push_back(cfg.nonterminals[i]); }
    for (size_t i = 0; i < cfg.terminals.size(); ++i)
        if (t_map[i] == 0) { t_map[i] = static_cast<int>(out.terminals.size()); out.terminals.push_back(cfg.terminals[i]); }
    out.start = nt_map[cfg.start];
    for (size_t i = 0; i < cfg.rules.size(); ++i) {
        if (!keep[i]) continue;
        Rule r = cfg.rules[i];
        r.lhs = nt_map[r.lhs];
        for (Sym& x : r.rhs) x.index = (x.terminal() ? t_map : nt_map)[x.index];
        out.rules.push_back(std::move(r));
    }
    return out;
}

std::vector<bool> useful_rules(const Cfg& cfg) {
    auto prod = productive(cfg);
    if (!prod[cfg.start]) throw Error("reduce", "EmptyLanguage", "start symbol derives no terminal string");
    std::vector<bool> alive(cfg.rules.size());
    for (size_t i = 0; i < cfg.rules.size(); ++i) {
        const Rule& r = cfg.rules[i];
        alive[i] = prod[r.lhs] && std::all_of(r.rhs.begin(), r.rhs.end(),
                                              [&](Sym x) { return x.terminal() || prod[x.index]; });
    }
    auto reach = reachable(cfg, alive);
    for (size_t i = 0; i < cfg.rules.size(); ++i) alive[i] = alive[i] && reach[cfg.rules[i].lhs];
    return alive;
}

} // namespace

Cfg reduce(const Cfg& cfg) { return restrict_rules(cfg, useful_rules(cfg)); }

bool is_reduced(const Cfg& cfg) {
    try {
        auto alive = useful_rules(cfg);
        return std::all_of(alive.begin(), alive.end(), [](bool b) { return b; });
    } catch (const Error&) {
        return false;
    }
}

std::vector<bool> nullable_nonterminals(const Cfg& cfg) {
    std::vector<bool> null(cfg.nonterminals.size(), false);
    bool changed = true;
    while (changed) {
        changed = false;
        for (const Rule& r : cfg.rules) {
            if (null[r.lhs]) continue;
            bool ok = std::all_of(r.rhs.begin(), r.rhs.end(), [&](Sym x) { return !x.terminal() && null[x.index]; });
            if (ok) { null[r.lhs] = true; changed = true; }
        }
    }
    return null;
}

SymbolRelation::SymbolRelation(int terminals, int nonterminals)
    : t_(terminals), n_(nonterminals),
      m_(terminals + nonterminals, std::vector<bool>(terminals + nonterminals, false)) {}

void SymbolRelation::close() {
    const int n = t_ + n_;
    for (int i = 0; i < n; ++i) m_[i][i] = true;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            if (m_[i][k])
                for (int j = 0; j < n; ++j)
                    if (m_[k][j]) m_[i][j] = true;
}

SymbolRelation left_corner_relation(const Cfg& cfg, bool ignore_nullable_prefix) {
    SymbolRelation rel(static_cast<int>(cfg.terminals.size()), static_cast<int>(cfg.nonterminals.size()));
    auto null = nullable_nonterminals(cfg);
    for (const Rule& r : cfg.rules) {
        Sym lhs{SymKind::Nonterminal, r.lhs};
        for (Sym x : r.rhs) {
            rel.set(x, lhs);
            if (!ignore_nullable_prefix || x.terminal() || !null[x.index]) break;
        }
    }
    rel.close();
    return rel;
}

Pcfg mle_estimate(const Cfg& cfg, const Corpus& corpus) {
    std::vector<long> count(cfg.rules.size(), 0);
    for (const Derivation& d : corpus) {
        derivation_yield(cfg, d, "mle_estimate");
        for (int r : d) ++count[r];
    }
    std::string uncovered;
    for (size_t r = 0; r < cfg.rules.size(); ++r)
        if (count[r] == 0) uncovered += (uncovered.empty() ? "" : " ") + cfg.rules[r].id;
    if (!uncovered.empty()) throw Error("mle_estimate", "UncoveredRule", uncovered);
    std::vector<long> per_lhs(cfg.nonterminals.size(), 0);
    for (size_t r = 0; r < cfg.rules.size(); ++r) per_lhs[cfg.rules[r].lhs] += count[r];
    Pcfg out{cfg, {}};
    for (size_t r = 0; r < cfg.rules.size(); ++r) {
        Rational q(count[r], per_lhs[cfg.rules[r].lhs]);
        q.canonicalize();
        out.prob.push_back(Prob(q));
    }
    return out;
}

PartitionResult partition_functions(const WeightedCfg& g, double tolerance, int max_iter, bool parallel) {
    const Cfg& cfg = g.cfg;
    const int n = static_cast<int>(cfg.nonterminals.size());
    std::vector<std::vector<int>> by_lhs(n), deps(n);
    for (size_t r = 0; r < cfg.rules.size(); ++r) {
        by_lhs[cfg.rules[r].lhs].push_back(static_cast<int>(r));
        for (Sym x : cfg.rules[r].rhs)
            if (!x.terminal()) deps[cfg.rules[r].lhs].push_back(x.index);
    }
    auto scc = strongly_connected_components(deps);
    PartitionResult res;
    res.z.assign(n, Prob(0));
    res.exact = true;
    std::vector<bool> done(n, false);
    for (size_t c = 0; c < scc.components.size(); ++c) {
        const auto& comp = scc.components[c];
        if (!scc.cyclic[c]) {
            int a = comp[0];
            Prob sum(0);
            for (int r : by_lhs[a]) {
                Prob term = g.weight[r];
                for (Sym x : cfg.rules[r].rhs)
                    if (!x.terminal()) term *= res.z[x.index];
                sum += term;
            }
            res.z[a] = sum;
            done[a] = true;
            continue;
        }
        res.exact = false;
        std::vector<int> local(n, -1);
        for (size_t i = 0; i < comp.size(); ++i) local[comp[i]] = static_cast<int>(i);
        PolySystem sys;
        sys.equations.resize(comp.size());
        for (size_t i = 0; i < comp.size(); ++i) {
            for (int r : by_lhs[comp[i]]) {
                Term t;
                t.coef = g.weight[r].to_double();
                for (Sym x : cfg.rules[r].rhs) {
                    if (x.terminal()) continue;
                    if (local[x.index] >= 0) t.vars.push_back(local[x.index]);
                    else t.coef *= res.z[x.index].to_double();
                }
                if (t.coef != 0.0) sys.equations[i].push_back(std::move(t));
            }
        }
        auto fp = least_fixpoint(sys, tolerance, max_iter, parallel);
        res.iterations = std::max(res.iterations, fp.iterations);
        if (!fp.converged) {
            std::vector<double> last(n);
            for (int a = 0; a < n; ++a) last[a] = res.z[a].to_double();
            for (size_t i = 0; i < comp.size(); ++i) last[comp[i]] = fp.values[i];
            throw NonConvergence("partition_functions", std::move(last), fp.last_change);
        }
        for (size_t i = 0; i < comp.size(); ++i) {
            res.z[comp[i]] = Prob::approx(fp.values[i]);
            done[comp[i]] = true;
        }
    }
    return res;
}

PartitionResult partition_functions(const Pcfg& g, double tolerance, int max_iter) {
    return partition_functions(WeightedCfg{g.cfg, g.prob}, tolerance, max_iter);
}

bool is_proper(const Pcfg& g, double tolerance) {
    std::vector<Prob> sum(g.cfg.nonterminals.size(), Prob(0));
    for (size_t r = 0; r < g.cfg.rules.size(); ++r) {
        if (g.prob[r] < Prob(0) || Prob(1) < g.prob[r]) return false;
        sum[g.cfg.rules[r].lhs] += g.prob[r];
    }
    for (size_t a = 0; a < sum.size(); ++a) {
        if (g.cfg.rules_of(static_cast<int>(a)).empty()) continue;
        if (!approx_equal(sum[a], Prob(1), tolerance)) return false;
    }
    return true;
}

ConsistencyVerdict is_consistent(const Pcfg& g, double tolerance, int max_iter) {
    // iterate well past the comparison tolerance: the iteration error can be
    // several times the last change when the contraction is slow
    auto pf = partition_functions(g, std::max(tolerance * 1e-3, 1e-15), max_iter);
    ConsistencyVerdict v;
    v.z_start = pf.z[g.cfg.start];
    v.consistent = approx_equal(v.z_start, Prob(1), tolerance);
    return v;
}

Word derivation_yield(const Cfg& cfg, const Derivation& d, const std::string& op) {
    // sentential form kept reversed so the leftmost symbol sits at the back
    std::vector<Sym> form{Sym{SymKind::Nonterminal, cfg.start}};
    Word out;
    auto flush = [&] {
        while (!form.empty() && form.back().terminal()) { out.push_back(form.back().index); form.pop_back(); }
    };
    for (size_t i = 0; i < d.size(); ++i) {
        flush();
        int r = d[i];
        if (r < 0 || r >= static_cast<int>(cfg.rules.size()))
            throw Error(op, "MalformedDerivation", "unknown rule at step " + std::to_string(i));
        if (form.empty() || cfg.rules[r].lhs != form.back().index)
            throw Error(op, "MalformedDerivation",
                        "rule " + cfg.rules[r].id + " does not rewrite the leftmost nonterminal at step " +
                            std::to_string(i));
        form.pop_back();
        const auto& rhs = cfg.rules[r].rhs;
        for (auto it = rhs.rbegin(); it != rhs.rend(); ++it) form.push_back(*it);
    }
    flush();
    if (!form.empty()) throw Error(op, "MalformedDerivation", "derivation is incomplete");
    return out;
}

bool is_complete_derivation(const Cfg& cfg, const Derivation& d) {
    try {
        derivation_yield(cfg, d);
        return true;
    } catch (const Error&) {
        return false;
    }
}

Prob derivation_probability(const Pcfg& g, const Derivation& d) {
    Prob p(1);
    for (int r : d) p *= g.prob[r];
    return p;
}

namespace {

struct DerivationSearch {
    const Cfg& cfg;
    int max_steps;
    const std::function<void(const Derivation&, const Word&)>& emit;
    const Word* target;
    std::vector<int> min_len; // shortest terminal yield per nonterminal
    Derivation d;
    Word yield;

    // form is reversed: back() is the leftmost symbol
    void run(std::vector<Sym>& form) {
        // move leading terminals into the yield
        size_t moved = 0;
        while (!form.empty() && form.back().terminal()) {
            int a = form.back().index;
            if (target) {
                if (yield.size() >= target->size() || (*target)[yield.size()] != a) {
                    undo(form, moved);
                    return;
                }
            }
            yield.push_back(a);
            form.pop_back();
            ++moved;
        }
        if (form.empty()) {
            if (!target || yield.size() == target->size()) emit(d, yield);
            undo(form, moved);
            return;
        }
        int pending = 0;
        size_t need_terminals = 0;
        for (Sym x : form) {
            if (x.terminal()) ++need_terminals;
            else { ++pending; need_terminals += min_len[x.index]; }
        }
        if (static_cast<int>(d.size()) + pending > max_steps ||
            (target && yield.size() + need_terminals > target->size())) {
            undo(form, moved);
            return;
        }
        Sym lead = form.back();
        form.pop_back();
        for (size_t r = 0; r < cfg.rules.size(); ++r) {
            if (cfg.rules[r].lhs != lead.index) continue;
            const auto& rhs = cfg.rules[r].rhs;
            for (auto it = rhs.rbegin(); it != rhs.rend(); ++it) form.push_back(*it);
            d.push_back(static_cast<int>(r));
            run(form);
            d.pop_back();
            form.resize(form.size() - rhs.size());
        }
        form.push_back(lead);
        undo(form, moved);
    }

    void undo(std::vector<Sym>& form, size_t moved) {
        for (size_t i = 0; i < moved; ++i) {
            form.push_back(Sym{SymKind::Terminal, yield.back()});
            yield.pop_back();
        }
    }
};

std::vector<int> shortest_yields(const Cfg& cfg) {
    const int inf = 1 << 28;
    std::vector<int> len(cfg.nonterminals.size(), inf);
    bool changed = true;
    while (changed) {
        changed = false;
        for (const Rule& r : cfg.rules) {
            long s = 0;
            for (Sym x : r.rhs) s += x.terminal() ? 1 : len[x.index];
            if (s < len[r.lhs]) { len[r.lhs] = static_cast<int>(s); changed = true; }
        }
    }
    return len;
}

} // namespace

void enumerate_derivations(const Cfg& cfg, int max_steps,
                           const std::function<void(const Derivation&, const Word&)>& emit, const Word* target) {
    DerivationSearch s{cfg, max_steps, emit, target, shortest_yields(cfg), {}, {}};
    std::vector<Sym> form{Sym{SymKind::Nonterminal, cfg.start}};
    s.run(form);
}

std::vector<std::pair<Derivation, Word>> enumerate_derivations(const Cfg& cfg, int max_steps) {
    std::vector<std::pair<Derivation, Word>> out;
    enumerate_derivations(cfg, max_steps, [&](const Derivation& d, const Word& w) { out.emplace_back(d, w); });
    return out;
}

Prob string_probability_cfg(const Pcfg& g, const Word& w, int max_steps) {
    Prob total(0);
    if (std::any_of(w.begin(), w.end(), [](int a) { return a < 0; })) return total;
    enumerate_derivations(
        g.cfg, max_steps, [&](const Derivation& d, const Word&) { total += derivation_probability(g, d); }, &w);
    return total;
}

Word to_word(const Cfg& cfg, const std::vector<std::string>& tokens) {
    Word w;
    for (const auto& t : tokens) w.push_back(cfg.terminal_index(t));
    return w;
}

std::string word_text(const Cfg& cfg, const Word& w) {
    std::string s;
    for (int a : w) s += (s.empty() ? "" : " ") + (a < 0 ? std::string("?") : cfg.terminals[a]);
    return s;
}

std::string derivation_text(const Cfg& cfg, const Derivation& d) {
    std::string s;
    for (int r : d) s += (s.empty() ? "" : " ") + cfg.rules[r].id;
    return s;
}

} // namespace probstrat
