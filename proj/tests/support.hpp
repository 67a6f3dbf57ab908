#pragma once

#include "probstrat/io.hpp"
#include "probstrat/lifting.hpp"
#include "probstrat/prefix.hpp"
#include "probstrat/properties.hpp"
#include "probstrat/strategies.hpp"

#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace probstrat {
inline void PrintTo(const Prob& p, std::ostream* os) { *os << p.str(); }
} // namespace probstrat

namespace testing_support {

using namespace probstrat;

inline std::string fixture_path(const std::string& name) { return std::string(FIXTURE_DIR) + "/" + name; }

inline GrammarDoc load(const std::string& name) { return parse_grammar(read_text_file(fixture_path(name)), name); }
inline Pcfg load_pcfg(const std::string& name) { return to_pcfg(load(name), name); }

inline GrammarDoc grammar(const std::string& text) { return parse_grammar(text, "test"); }
inline Pcfg pcfg(const std::string& text) { return to_pcfg(grammar(text), "test"); }

// Kind of the library error thrown by f, "" when nothing is thrown.
template <class F>
std::string error_kind(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    return "";
}

inline Pcfg g_lr() { return load_pcfg("g_lr.pcfg"); }
inline Pcfg g_wr() { return load_pcfg("g_wr.pcfg"); }
inline Cfg g_footnote() { return load("g_footnote.cfg").cfg; }

inline Word word(const Cfg& g, const std::string& text) {
    Word w = parse_input(g.terminals, text);
    return w;
}

inline Word repeat_then(const Cfg& g, int n, const std::string& a, const std::string& last) {
    std::string s;
    for (int i = 0; i < n; ++i) s += a + " ";
    return word(g, s + last);
}

// mpq_class(n, d) does not reduce the fraction by itself
inline Rational frac(long n, long d) {
    Rational r(n, d);
    r.canonicalize();
    return r;
}

// Hand-written copy of G_LR's rule probabilities, independent of the parser.
inline Rational glr_oracle(const std::string& w) {
    // S -> A B; A -> a C | a D (1/3, 2/3); B -> b C | b D (2/3, 1/3)
    if (w.size() != 6 || w.substr(0, 2) != "ax" || w.substr(3, 2) != "bx") return 0;
    Rational pa = w[2] == 'c' ? Rational(1, 3) : w[2] == 'd' ? Rational(2, 3) : Rational(0);
    Rational pb = w[5] == 'c' ? Rational(2, 3) : w[5] == 'd' ? Rational(1, 3) : Rational(0);
    return pa * pb;
}

// p(a^n b) = 1/2 (1/3)^n (2/3), p(a^n c) = 1/2 (2/3)^n (1/3)
inline Rational gwr_oracle(int n, char last) {
    Rational p(1, 2);
    for (int i = 0; i < n; ++i) p *= last == 'b' ? Rational(1, 3) : Rational(2, 3);
    return p * (last == 'b' ? Rational(2, 3) : Rational(1, 3));
}

// Random reduced acyclic PCFG: nonterminal i only rewrites to terminals and
// nonterminals j > i, the start rule is unique and reads a terminal, and
// every nonterminal is reachable. Probabilities are small-denominator
// rationals.
struct GrammarGen {
    std::mt19937 rng;
    int max_nonterminals = 6;
    int max_rules = 12;
    bool allow_eps = true;

    explicit GrammarGen(unsigned seed) : rng(seed) {}

    int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

    Pcfg next() {
        for (;;) {
            Pcfg g = attempt();
            if (is_reduced(g.cfg)) return g;
        }
    }

private:
    Pcfg attempt() {
        const int n = pick(2, max_nonterminals);
        const int t = pick(1, 3);
        Cfg g;
        for (int i = 0; i < t; ++i) g.terminals.push_back(std::string(1, static_cast<char>('a' + i)));
        for (int i = 0; i < n; ++i) g.nonterminals.push_back(i == 0 ? "S" : std::string("N") + std::to_string(i));
        g.start = 0;
        auto term = [&] { return Sym{SymKind::Terminal, pick(0, t - 1)}; };
        auto nt_above = [&](int i) { return Sym{SymKind::Nonterminal, pick(i + 1, n - 1)}; };
        std::vector<int> rules_per(n, 1);
        int budget = std::min(max_rules, n + pick(0, max_rules - n));
        for (int extra = budget - n; extra > 0; --extra) rules_per[pick(1, n - 1)]++;
        std::vector<bool> mentioned(n, false);
        mentioned[0] = true;
        for (int a = 0; a < n; ++a) {
            for (int k = 0; k < rules_per[a]; ++k) {
                Rule r;
                r.id = "r" + std::to_string(g.rules.size());
                r.lhs = a;
                int len = a == 0 ? pick(1, 3) : pick(allow_eps ? 0 : 1, 3);
                for (int i = 0; i < len; ++i) {
                    bool use_nt = a + 1 < n && pick(0, 2) > 0;
                    r.rhs.push_back(use_nt ? nt_above(a) : term());
                }
                if (a == 0) {
                    // the start rule reads a terminal, so the start is never nullable
                    bool has_t = false;
                    for (Sym s : r.rhs) has_t = has_t || s.terminal();
                    if (!has_t) r.rhs.insert(r.rhs.begin() + pick(0, static_cast<int>(r.rhs.size())), term());
                }
                for (Sym s : r.rhs)
                    if (!s.terminal()) mentioned[s.index] = true;
                g.rules.push_back(std::move(r));
            }
            // later nonterminals must be reachable: thread the first unmentioned one in
            if (a + 1 < n && !mentioned[a + 1] && mentioned[a]) {
                g.rules.back().rhs.push_back(Sym{SymKind::Nonterminal, a + 1});
                mentioned[a + 1] = true;
            }
        }
        Pcfg pg;
        pg.cfg = g;
        std::vector<int> weight(g.rules.size());
        std::vector<int> total(n, 0);
        for (size_t r = 0; r < g.rules.size(); ++r) {
            weight[r] = pick(1, 4);
            total[g.rules[r].lhs] += weight[r];
        }
        for (size_t r = 0; r < g.rules.size(); ++r) pg.prob.push_back(Prob(frac(weight[r], total[g.rules[r].lhs])));
        return pg;
    }
};

// A random string of the grammar, by sampling rules uniformly.
inline Word sample_string(const Cfg& g, std::mt19937& rng) {
    Word out;
    std::vector<Sym> stack{Sym{SymKind::Nonterminal, g.start}};
    while (!stack.empty()) {
        Sym s = stack.back();
        stack.pop_back();
        if (s.terminal()) {
            out.push_back(s.index);
            continue;
        }
        auto rules = g.rules_of(s.index);
        const Rule& r = g.rules[rules[std::uniform_int_distribution<size_t>(0, rules.size() - 1)(rng)]];
        for (auto it = r.rhs.rbegin(); it != r.rhs.rend(); ++it) stack.push_back(*it);
    }
    return out;
}

// Sampled string of at most max_len symbols; falls back to the shortest
// seen when sampling keeps overshooting.
inline Word sample_short(const Cfg& g, std::mt19937& rng, size_t max_len = 5) {
    Word best;
    bool have = false;
    for (int attempt = 0; attempt < 50; ++attempt) {
        Word w = sample_string(g, rng);
        if (!have || w.size() < best.size()) best = w, have = true;
        if (best.size() <= max_len) break;
    }
    return best;
}

// Leftmost derivation with uniformly chosen rules.
inline Derivation sample_derivation(const Cfg& g, std::mt19937& rng) {
    Derivation d;
    std::vector<Sym> stack{Sym{SymKind::Nonterminal, g.start}};
    while (!stack.empty()) {
        Sym s = stack.back();
        stack.pop_back();
        if (s.terminal()) continue;
        auto rules = g.rules_of(s.index);
        int r = rules[std::uniform_int_distribution<size_t>(0, rules.size() - 1)(rng)];
        d.push_back(r);
        const auto& rhs = g.rules[r].rhs;
        for (auto it = rhs.rbegin(); it != rhs.rend(); ++it) stack.push_back(*it);
    }
    return d;
}

// Sampled derivations until every rule occurs at least once.
inline Corpus covering_corpus(const Cfg& g, std::mt19937& rng) {
    Corpus c;
    std::vector<bool> seen(g.rules.size(), false);
    size_t missing = g.rules.size();
    while (missing > 0) {
        c.push_back(sample_derivation(g, rng));
        for (int r : c.back())
            if (!seen[r]) seen[r] = true, --missing;
    }
    return c;
}

inline Word random_word(const Cfg& g, std::mt19937& rng, int max_len) {
    Word w(std::uniform_int_distribution<int>(0, max_len)(rng));
    for (int& x : w) x = std::uniform_int_distribution<int>(0, static_cast<int>(g.terminals.size()) - 1)(rng);
    return w;
}

// Sum of computation probabilities over all complete computations; fails
// loudly if the step bound cut the search.
inline Prob enumerated_probability(const Ppdt& a, const Word& w, int max_steps, bool* truncated = nullptr) {
    Prob sum(0);
    auto stats = enumerate_computations(a.pdt, w, max_steps, true, [&](const Computation& c, const Configuration&) {
        sum += computation_probability(a, c);
    });
    if (truncated) *truncated = stats.truncated;
    return sum;
}

inline const std::vector<StrategyKind>& spp_kinds() {
    static const std::vector<StrategyKind> k{StrategyKind::TopDown, StrategyKind::LeftCorner, StrategyKind::Plr,
                                             StrategyKind::EpsLeftCorner};
    return k;
}

} // namespace testing_support
