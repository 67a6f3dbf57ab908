#include "probstrat/strategies.hpp"

#include "probstrat/properties.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

namespace probstrat {

std::string kind_name(StrategyKind k) {
    switch (k) {
    case StrategyKind::TopDown: return "top_down";
    case StrategyKind::LeftCorner: return "left_corner";
    case StrategyKind::Plr: return "plr";
    case StrategyKind::EpsLeftCorner: return "eps_left_corner";
    case StrategyKind::Elr: return "elr";
    case StrategyKind::Lr0: return "lr0";
    }
    return "?";
}

const std::vector<StrategyKind>& all_kinds() {
    static const std::vector<StrategyKind> kinds{StrategyKind::TopDown, StrategyKind::LeftCorner,
                                                 StrategyKind::Plr,     StrategyKind::EpsLeftCorner,
                                                 StrategyKind::Elr,     StrategyKind::Lr0};
    return kinds;
}

StrategyKind parse_kind(const std::string& name) {
    for (StrategyKind k : all_kinds())
        if (kind_name(k) == name) return k;
    throw FormatError("strategy", "unknown strategy '" + name + "'");
}

namespace {

struct Augmented {
    Cfg g;
    int aug = 0; // index of S' -> S
};

Augmented augment(const Cfg& cfg) {
    Augmented a{cfg, static_cast<int>(cfg.rules.size())};
    std::string name = cfg.nonterminals[cfg.start] + "'";
    while (cfg.nonterminal_index(name) >= 0) name += "'";
    a.g.nonterminals.push_back(name);
    int top = static_cast<int>(a.g.nonterminals.size()) - 1;
    a.g.rules.push_back(Rule{"<start>", top, {Sym{SymKind::Nonterminal, cfg.start}}});
    a.g.start = top;
    return a;
}

void require_reduced(const Cfg& cfg) {
    check_well_formed(cfg, false, "construct");
    if (!is_reduced(cfg)) throw Error("construct", "NotReduced", "grammar has useless rules or symbols");
}

Pdt empty_pdt(const Cfg& cfg) {
    std::vector<std::string> ids;
    for (const Rule& r : cfg.rules) ids.push_back(r.id);
    return Pdt(cfg.terminals, ids);
}

std::string seq(const Cfg& g, const std::vector<Sym>& v, size_t from, size_t to) {
    std::string s;
    for (size_t i = from; i < to; ++i) s += (s.empty() ? "" : " ") + g.symbol_name(v[i]);
    return s;
}

// Rules that repeat another rule's lhs and rhs would otherwise share item
// names, and interning would merge their items.
std::string duplicate_tag(const Cfg& g, int r) {
    const Rule& rule = g.rules[r];
    for (size_t o = 0; o < g.rules.size(); ++o)
        if (static_cast<int>(o) != r && g.rules[o].lhs == rule.lhs && g.rules[o].rhs == rule.rhs)
            return " (" + rule.id + ")";
    return "";
}

// "A -> a . B c" without brackets
std::string dotted_body(const Cfg& g, int r, int dot) {
    const Rule& rule = g.rules[r];
    std::string s = g.nonterminals[rule.lhs] + " ->";
    for (int i = 0; i <= static_cast<int>(rule.rhs.size()); ++i) {
        if (i == dot) s += " .";
        if (i < static_cast<int>(rule.rhs.size())) s += " " + g.symbol_name(rule.rhs[i]);
    }
    return s + duplicate_tag(g, r);
}

Output out_rule(int r) { return {OutSym::rule(r)}; }

bool fully_nullable(const Cfg& g, const std::vector<bool>& nullable, int r) {
    const auto& rhs = g.rules[r].rhs;
    return std::all_of(rhs.begin(), rhs.end(), [&](Sym x) { return !x.terminal() && nullable[x.index]; });
}

Sym nt(int i) { return Sym{SymKind::Nonterminal, i}; }
Sym term(int i) { return Sym{SymKind::Terminal, i}; }

// ---------------------------------------------------------------- top-down

Pdt build_top_down(const Augmented& a, const Cfg& cfg) {
    const Cfg& g = a.g;
    Pdt p = empty_pdt(cfg);
    auto D = [&](int r, int k) { return p.intern("[" + dotted_body(g, r, k) + "]"); };
    for (size_t r = 0; r < g.rules.size(); ++r)
        for (size_t k = 0; k <= g.rules[r].rhs.size(); ++k) D(static_cast<int>(r), static_cast<int>(k));
    p.init = D(a.aug, 0);
    p.final = D(a.aug, 1);
    for (size_t ri = 0; ri < g.rules.size(); ++ri) {
        int r = static_cast<int>(ri);
        const auto& rhs = g.rules[r].rhs;
        for (int k = 0; k < static_cast<int>(rhs.size()); ++k) {
            Sym x = rhs[k];
            if (x.terminal()) {
                p.swap(D(r, k), x.index, {}, D(r, k + 1));
                continue;
            }
            for (int pi : g.rules_of(x.index)) {
                p.push_swap(D(r, k), -1, out_rule(pi), D(pi, 0), "predict " + g.rules[pi].id);
                p.pop(D(r, k), D(pi, static_cast<int>(g.rules[pi].rhs.size())), D(r, k + 1));
            }
        }
    }
    return p;
}

// ---------------------------------------------------------------- left-corner

Pdt build_left_corner(const Augmented& a, const Cfg& cfg) {
    const Cfg& g = a.g;
    auto lc = left_corner_relation(g, false);
    Pdt p = empty_pdt(cfg);
    auto H = [&](int r, int d) { return p.intern("[" + dotted_body(g, r, d) + "]"); };
    auto Cn = [&](int r, int d, Sym x) { return p.intern("[" + dotted_body(g, r, d) + " ; " + g.symbol_name(x) + "]"); };
    p.init = H(a.aug, 0);
    p.final = H(a.aug, 1);
    const int nt_count = static_cast<int>(g.nonterminals.size());
    const int t_count = static_cast<int>(g.terminals.size());
    for (size_t ri = 0; ri < g.rules.size(); ++ri) {
        int r = static_cast<int>(ri);
        const auto& rhs = g.rules[r].rhs;
        for (int d = r == a.aug ? 0 : 1; d < static_cast<int>(rhs.size()); ++d) {
            Sym y = rhs[d];
            int h = H(r, d);
            for (int t = 0; t < t_count; ++t)
                if (lc.holds(term(t), y)) p.swap(h, t, {}, Cn(r, d, term(t)));
            if (!y.terminal()) {
                for (size_t pi = 0; pi < g.rules.size(); ++pi) {
                    const Rule& rule = g.rules[pi];
                    if (!lc.holds(nt(rule.lhs), y)) continue;
                    int ip = static_cast<int>(pi);
                    if (rule.rhs.empty()) {
                        p.swap(h, -1, out_rule(ip), Cn(r, d, nt(rule.lhs)));
                    } else {
                        int c = Cn(r, d, rule.rhs[0]);
                        p.push_swap(c, -1, out_rule(ip), H(ip, 1), "project " + rule.id);
                        p.pop(c, H(ip, static_cast<int>(rule.rhs.size())), Cn(r, d, nt(rule.lhs)));
                    }
                }
            }
            p.swap(Cn(r, d, y), -1, y.terminal() ? Output{} : Output{OutSym::end()}, H(r, d + 1));
        }
    }
    (void)nt_count;
    return p;
}

// ---------------------------------------------------------------- PLR

Pdt build_plr(const Augmented& a, const Cfg& cfg) {
    const Cfg& g = a.g;
    auto lc = left_corner_relation(g, false);
    Pdt p = empty_pdt(cfg);
    auto P = [&](int lhs, const std::vector<Sym>& alpha) {
        return p.intern("[" + g.nonterminals[lhs] + " ->" + (alpha.empty() ? "" : " " + seq(g, alpha, 0, alpha.size())) +
                        "]");
    };
    auto PC = [&](int lhs, const std::vector<Sym>& alpha, Sym x) {
        return p.intern("[" + g.nonterminals[lhs] + " ->" + (alpha.empty() ? "" : " " + seq(g, alpha, 0, alpha.size())) +
                        " ; " + g.symbol_name(x) + "]");
    };
    auto Done = [&](int r) { return p.intern("[" + dotted_body(g, r, static_cast<int>(g.rules[r].rhs.size())) + "]"); };
    p.init = P(g.start, {});
    p.final = P(g.start, {nt(cfg.start)});

    // distinct (lhs, prefix) hosts
    std::set<std::pair<int, std::vector<Sym>>> hosts;
    for (const Rule& rule : g.rules)
        for (size_t k = 0; k < rule.rhs.size(); ++k)
            if (k >= 1 || rule.lhs == g.start)
                hosts.insert({rule.lhs, std::vector<Sym>(rule.rhs.begin(), rule.rhs.begin() + k)});

    for (const auto& [lhs, alpha] : hosts) {
        std::set<Sym> goals;
        for (int r : g.rules_of(lhs)) {
            const auto& rhs = g.rules[r].rhs;
            if (rhs.size() > alpha.size() && std::equal(alpha.begin(), alpha.end(), rhs.begin()))
                goals.insert(rhs[alpha.size()]);
        }
        auto serves = [&](Sym x) {
            return std::any_of(goals.begin(), goals.end(), [&](Sym y) { return !y.terminal() && lc.holds(x, y); });
        };
        int h = P(lhs, alpha);
        for (int t = 0; t < static_cast<int>(g.terminals.size()); ++t)
            if (std::any_of(goals.begin(), goals.end(), [&](Sym y) { return lc.holds(term(t), y); }))
                p.swap(h, t, {}, PC(lhs, alpha, term(t)));
        std::set<std::pair<Sym, int>> pushed;
        for (size_t pi = 0; pi < g.rules.size(); ++pi) {
            const Rule& rule = g.rules[pi];
            if (!serves(nt(rule.lhs))) continue;
            int ip = static_cast<int>(pi);
            if (rule.rhs.empty()) {
                p.swap(h, -1, out_rule(ip), PC(lhs, alpha, nt(rule.lhs)));
                continue;
            }
            Sym x = rule.rhs[0];
            int c = PC(lhs, alpha, x);
            if (pushed.insert({x, rule.lhs}).second) p.push(c, P(rule.lhs, {x}));
            p.pop(c, Done(ip), PC(lhs, alpha, nt(rule.lhs)));
        }
        for (Sym y : goals) {
            std::vector<Sym> longer = alpha;
            longer.push_back(y);
            p.swap(PC(lhs, alpha, y), -1, {}, P(lhs, longer));
        }
    }
    for (size_t pi = 0; pi < g.rules.size(); ++pi) {
        const Rule& rule = g.rules[pi];
        if (static_cast<int>(pi) == a.aug || rule.rhs.empty()) continue;
        p.swap(P(rule.lhs, rule.rhs), -1, out_rule(static_cast<int>(pi)), Done(static_cast<int>(pi)),
               "complete " + rule.id);
    }
    return p;
}

// ---------------------------------------------------------------- epsilon-LC

enum class Mode { Plus, Eps, Td };

Pdt build_eps_left_corner(const Augmented& a, const Cfg& cfg) {
    const Cfg& g = a.g;
    auto nullable = nullable_nonterminals(g);
    if (nullable[cfg.start])
        throw Error("construct", "NullablePrefixInStart",
                    "start symbol " + cfg.nonterminals[cfg.start] + " derives the empty string");
    auto lce = left_corner_relation(g, true);
    // left corners through rules whose right-hand sides derive only the empty string
    SymbolRelation lcn(static_cast<int>(g.terminals.size()), static_cast<int>(g.nonterminals.size()));
    for (size_t r = 0; r < g.rules.size(); ++r)
        if (!g.rules[r].rhs.empty() && fully_nullable(g, nullable, static_cast<int>(r)))
            lcn.set(g.rules[r].rhs[0], nt(g.rules[r].lhs));
    lcn.close();

    Pdt p = empty_pdt(cfg);
    auto body = [&](int r, int m, int d, int e) {
        const Rule& rule = g.rules[r];
        const int k = static_cast<int>(rule.rhs.size());
        std::string s = g.nonterminals[rule.lhs] + " ->";
        for (int i = m; i <= k; ++i) {
            if (i == m + d) s += " .";
            if (i < k) s += " " + g.symbol_name(rule.rhs[i]);
        }
        s += " ,";
        for (int i = 0; i <= m; ++i) {
            if (i == e) s += " .";
            if (i < m) s += " " + g.symbol_name(rule.rhs[i]);
        }
        return s + duplicate_tag(g, r);
    };
    auto suffix = [](Mode md) { return md == Mode::Eps ? " eps" : md == Mode::Td ? " td" : ""; };
    auto E = [&](int r, int m, int d, int e, Mode md) { return p.intern("[" + body(r, m, d, e) + "]" + suffix(md)); };
    auto EC = [&](int r, int m, int d, Mode hm, Sym x, Mode xm) {
        return p.intern("[" + body(r, m, d, 0) + " ; " + g.symbol_name(x) + "]" + suffix(hm) +
                        (xm == Mode::Eps ? " /eps" : ""));
    };
    auto skips = [&](int r) {
        // positions m such that rhs[0..m) derives the empty string and rhs[m] exists
        std::vector<int> out;
        const auto& rhs = g.rules[r].rhs;
        for (int m = 0; m < static_cast<int>(rhs.size()); ++m) {
            out.push_back(m);
            if (rhs[m].terminal() || !nullable[rhs[m].index]) break;
        }
        return out;
    };

    p.init = E(a.aug, 0, 0, 0, Mode::Plus);
    p.final = E(a.aug, 0, 1, 0, Mode::Plus);

    auto td_phase = [&](int r, int m, Mode md) {
        const int k = static_cast<int>(g.rules[r].rhs.size());
        for (int e = 0; e < m; ++e) {
            int item = E(r, m, k - m, e, md);
            int b = g.rules[r].rhs[e].index;
            for (int pi : g.rules_of(b)) {
                if (!fully_nullable(g, nullable, pi)) continue;
                int kp = static_cast<int>(g.rules[pi].rhs.size());
                p.push_swap(item, -1, out_rule(pi), E(pi, kp, 0, 0, Mode::Td), "expand " + g.rules[pi].id);
                p.pop(item, E(pi, kp, 0, kp, Mode::Td), E(r, m, k - m, e + 1, md));
            }
        }
    };

    for (size_t ri = 0; ri < g.rules.size(); ++ri) {
        const int r = static_cast<int>(ri);
        const auto& rhs = g.rules[r].rhs;
        const int k = static_cast<int>(rhs.size());
        const bool all_null = fully_nullable(g, nullable, r);
        for (int m : skips(r)) {
            if (r == a.aug && m > 0) continue;
            for (Mode hm : {Mode::Plus, Mode::Eps}) {
                if (hm == Mode::Eps && (!all_null || m > 0 || r == a.aug)) continue;
                for (int d = r == a.aug ? 0 : 1; m + d < k; ++d) {
                    Sym y = rhs[m + d];
                    int h = E(r, m, d, 0, hm);
                    if (hm == Mode::Plus)
                        for (int t = 0; t < static_cast<int>(g.terminals.size()); ++t)
                            if (lce.holds(term(t), y)) p.swap(h, t, {}, EC(r, m, d, hm, term(t), Mode::Plus));
                    if (!y.terminal()) {
                        for (size_t pi = 0; pi < g.rules.size(); ++pi) {
                            const Rule& rule = g.rules[pi];
                            const int ip = static_cast<int>(pi);
                            const int kp = static_cast<int>(rule.rhs.size());
                            Sym c = nt(rule.lhs);
                            if (rule.rhs.empty()) {
                                if (lcn.holds(c, y))
                                    p.swap(h, -1, {OutSym::rule(ip), OutSym::marker(0)}, EC(r, m, d, hm, c, Mode::Eps));
                                continue;
                            }
                            if (hm == Mode::Plus && lce.holds(c, y)) {
                                for (int mp : skips(ip)) {
                                    int corner = EC(r, m, d, hm, rule.rhs[mp], Mode::Plus);
                                    p.push_swap(corner, -1, {OutSym::rule(ip), OutSym::marker(mp)},
                                                E(ip, mp, 1, 0, Mode::Plus), "project " + rule.id);
                                    p.pop(corner, E(ip, mp, kp - mp, mp, Mode::Plus), EC(r, m, d, hm, c, Mode::Plus));
                                }
                            }
                            if (fully_nullable(g, nullable, ip) && lcn.holds(c, y)) {
                                int corner = EC(r, m, d, hm, rule.rhs[0], Mode::Eps);
                                p.push_swap(corner, -1, {OutSym::rule(ip), OutSym::marker(0)},
                                            E(ip, 0, 1, 0, Mode::Eps), "project " + rule.id);
                                p.pop(corner, E(ip, 0, kp, 0, Mode::Eps), EC(r, m, d, hm, c, Mode::Eps));
                            }
                        }
                    }
                    Output close = y.terminal() ? Output{} : Output{OutSym::end()};
                    p.swap(EC(r, m, d, hm, y, Mode::Plus), -1, close, E(r, m, d + 1, 0, hm));
                    if (!y.terminal()) p.swap(EC(r, m, d, hm, y, Mode::Eps), -1, close, E(r, m, d + 1, 0, hm));
                }
                if (r != a.aug) td_phase(r, m, hm);
            }
        }
        if (all_null) td_phase(r, k, Mode::Td);
    }
    return p;
}

// ---------------------------------------------------------------- ELR

struct ElrItem {
    std::vector<int> gamma;
    std::vector<Sym> alpha;
    bool corner = false;
    Sym x;
};

Pdt build_elr(const Augmented& a, const Cfg& cfg) {
    const Cfg& g = a.g;
    auto lc = left_corner_relation(g, false);
    Pdt p = empty_pdt(cfg);
    std::map<int, ElrItem> info;
    std::deque<int> work;
    auto name = [&](const ElrItem& it) {
        std::string s = "[{";
        for (size_t i = 0; i < it.gamma.size(); ++i) s += (i ? "," : "") + g.nonterminals[it.gamma[i]];
        s += "} ->";
        if (!it.alpha.empty()) s += " " + seq(g, it.alpha, 0, it.alpha.size());
        if (it.corner) s += " ; " + g.symbol_name(it.x);
        return s + "]";
    };
    auto get = [&](ElrItem it) {
        std::sort(it.gamma.begin(), it.gamma.end());
        it.gamma.erase(std::unique(it.gamma.begin(), it.gamma.end()), it.gamma.end());
        int before = p.symbol_count();
        int s = p.intern(name(it));
        if (s == before) {
            info.emplace(s, std::move(it));
            work.push_back(s);
        }
        return s;
    };
    // rules A -> alpha B beta with A in gamma: the symbols B that may follow alpha
    auto goals = [&](const std::vector<int>& gamma, const std::vector<Sym>& alpha) {
        std::set<Sym> out;
        for (int A : gamma)
            for (int r : g.rules_of(A)) {
                const auto& rhs = g.rules[r].rhs;
                if (rhs.size() > alpha.size() && std::equal(alpha.begin(), alpha.end(), rhs.begin()))
                    out.insert(rhs[alpha.size()]);
            }
        return out;
    };
    auto serves = [&](const std::set<Sym>& gl, int c) {
        return std::any_of(gl.begin(), gl.end(), [&](Sym b) { return !b.terminal() && lc.holds(nt(c), b); });
    };

    p.init = get({{g.start}, {}, false, {}});
    p.final = get({{g.start}, {nt(cfg.start)}, false, {}});
    std::set<std::tuple<int, int, int>> pops_done;
    std::vector<int> corners, plains;
    while (!work.empty()) {
        while (!work.empty()) {
            int s = work.front();
            work.pop_front();
            const ElrItem it = info.at(s);
            auto gl = goals(it.gamma, it.alpha);
            if (!it.corner) {
                plains.push_back(s);
                for (int t = 0; t < static_cast<int>(g.terminals.size()); ++t)
                    if (std::any_of(gl.begin(), gl.end(), [&](Sym y) { return lc.holds(term(t), y); }))
                        p.swap(s, t, {}, get({it.gamma, it.alpha, true, term(t)}));
                for (size_t pi = 0; pi < g.rules.size(); ++pi)
                    if (g.rules[pi].rhs.empty() && serves(gl, g.rules[pi].lhs))
                        p.swap(s, -1, out_rule(static_cast<int>(pi)), get({it.gamma, it.alpha, true, nt(g.rules[pi].lhs)}));
                continue;
            }
            corners.push_back(s);
            std::vector<int> gamma2;
            for (const Rule& rule : g.rules)
                if (!rule.rhs.empty() && rule.rhs[0] == it.x && serves(gl, rule.lhs)) gamma2.push_back(rule.lhs);
            if (!gamma2.empty()) p.push(s, get({gamma2, {it.x}, false, {}}));
            std::vector<int> gamma3;
            for (int A : it.gamma)
                for (int r : g.rules_of(A)) {
                    const auto& rhs = g.rules[r].rhs;
                    if (rhs.size() > it.alpha.size() && std::equal(it.alpha.begin(), it.alpha.end(), rhs.begin()) &&
                        rhs[it.alpha.size()] == it.x)
                        gamma3.push_back(A);
                }
            if (!gamma3.empty()) {
                std::vector<Sym> longer = it.alpha;
                longer.push_back(it.x);
                p.swap(s, -1, {}, get({gamma3, longer, false, {}}));
            }
        }
        // combined pop/swap for every corner item and completed item pair
        for (int c : std::vector<int>(corners)) {
            const ElrItem ci = info.at(c);
            auto gl = goals(ci.gamma, ci.alpha);
            for (int q : std::vector<int>(plains)) {
                const ElrItem qi = info.at(q);
                if (qi.alpha.empty() || qi.alpha[0] != ci.x) continue;
                for (int C : qi.gamma) {
                    if (!serves(gl, C)) continue;
                    for (int r : g.rules_of(C)) {
                        if (g.rules[r].rhs != qi.alpha) continue;
                        if (!pops_done.insert({c, q, r}).second) continue;
                        p.pop_swap(c, q, -1, out_rule(r), get({ci.gamma, ci.alpha, true, nt(C)}), "reduce " + g.rules[r].id);
                    }
                }
            }
        }
    }
    return p;
}

// ---------------------------------------------------------------- LR(0)

using Item = std::pair<int, int>; // rule, dot
using ItemSet = std::set<Item>;

ItemSet closure(const Cfg& g, ItemSet s) {
    std::deque<Item> work(s.begin(), s.end());
    while (!work.empty()) {
        auto [r, d] = work.front();
        work.pop_front();
        const auto& rhs = g.rules[r].rhs;
        if (d >= static_cast<int>(rhs.size()) || rhs[d].terminal()) continue;
        for (int pi : g.rules_of(rhs[d].index))
            if (s.insert({pi, 0}).second) work.push_back({pi, 0});
    }
    return s;
}

Pdt build_lr0(const Augmented& a, const Cfg& cfg) {
    const Cfg& g = a.g;
    std::vector<ItemSet> states;
    std::vector<ItemSet> kernels;
    std::map<ItemSet, int> by_kernel;
    std::vector<std::map<Sym, int>> go;
    auto state_of = [&](const ItemSet& kernel) {
        auto it = by_kernel.find(kernel);
        if (it != by_kernel.end()) return it->second;
        int id = static_cast<int>(states.size());
        by_kernel.emplace(kernel, id);
        kernels.push_back(kernel);
        states.push_back(closure(g, kernel));
        go.emplace_back();
        return id;
    };
    state_of({{a.aug, 0}});
    for (size_t q = 0; q < states.size(); ++q) {
        std::map<Sym, ItemSet> next;
        for (auto [r, d] : states[q]) {
            const auto& rhs = g.rules[r].rhs;
            if (d < static_cast<int>(rhs.size())) next[rhs[d]].insert({r, d + 1});
        }
        for (auto& [x, kernel] : next) {
            int target = state_of(kernel);
            go[q][x] = target;
        }
    }

    auto state_name = [&](int q) {
        std::string s = "{";
        bool first = true;
        for (auto [r, d] : kernels[q]) {
            s += (first ? "" : ", ") + dotted_body(g, r, d);
            first = false;
        }
        return s + "}";
    };
    Pdt p = empty_pdt(cfg);
    std::vector<int> St(states.size());
    for (size_t q = 0; q < states.size(); ++q) St[q] = p.intern(state_name(static_cast<int>(q)));
    auto Gt = [&](int q, int A) { return p.intern("[" + state_name(q) + " ; " + g.nonterminals[A] + "]"); };
    auto It = [&](int r, int j) { return p.intern("<" + g.rules[r].id + " ; " + std::to_string(j) + ">"); };
    // the stack symbol standing for state q once the symbol x has been put above it
    auto under = [&](int q, Sym x) { return x.terminal() ? St[q] : Gt(q, x.index); };

    p.init = St[0];
    p.final = Gt(0, cfg.start);
    for (size_t qi = 0; qi < states.size(); ++qi) {
        int q = static_cast<int>(qi);
        for (auto [x, target] : go[q]) {
            if (x.terminal()) {
                p.push_swap(St[q], x.index, {}, St[target],
                            "shift " + g.terminals[x.index] + " in " + state_name(q));
            } else {
                bool accept_only = q == 0 && x.index == cfg.start && states[target].size() == 1;
                if (!accept_only) p.push(Gt(q, x.index), St[target], "goto " + g.nonterminals[x.index]);
            }
        }
        for (auto [r, d] : states[q]) {
            if (r == a.aug) continue;
            const auto& rhs = g.rules[r].rhs;
            const int m = static_cast<int>(rhs.size());
            if (d == m) {
                if (m == 0) p.swap(St[q], -1, out_rule(r), Gt(q, g.rules[r].lhs), "reduce " + g.rules[r].id);
                else p.swap(St[q], -1, {}, It(r, m), "reduce " + g.rules[r].id);
            }
            if (d < m && m > 0) {
                int below = under(q, rhs[d]);
                if (d >= 1) p.pop(below, It(r, d + 1), It(r, d));
                else p.pop_swap(below, It(r, 1), -1, out_rule(r), Gt(q, g.rules[r].lhs), "reduce " + g.rules[r].id);
            }
        }
    }
    return p;
}

} // namespace

Pdt construct_raw(StrategyKind kind, const Cfg& cfg) {
    require_reduced(cfg);
    Augmented a = augment(cfg);
    switch (kind) {
    case StrategyKind::TopDown: return build_top_down(a, cfg);
    case StrategyKind::LeftCorner: return build_left_corner(a, cfg);
    case StrategyKind::Plr: return build_plr(a, cfg);
    case StrategyKind::EpsLeftCorner: return build_eps_left_corner(a, cfg);
    case StrategyKind::Elr: return build_elr(a, cfg);
    case StrategyKind::Lr0: return build_lr0(a, cfg);
    }
    throw Error("construct", "UnknownStrategy", "");
}

Pdt construct(StrategyKind kind, const Cfg& cfg) { return trim_pdt(normalize(construct_raw(kind, cfg))); }

// ---------------------------------------------------------------- output mapping

namespace {

[[noreturn]] void malformed(const std::string& why) { throw Error("map_output", "MalformedOutput", why); }

struct OutputReader {
    const Cfg& cfg;
    const Output& v;
    size_t pos = 0;

    int rule() {
        if (pos >= v.size() || v[pos].kind != OutKind::Rule) malformed("expected a rule at position " + std::to_string(pos));
        int r = v[pos++].value;
        if (r < 0 || r >= static_cast<int>(cfg.rules.size())) malformed("unknown rule");
        return r;
    }
    int marker() {
        if (pos >= v.size() || v[pos].kind != OutKind::Marker) malformed("expected a marker at position " + std::to_string(pos));
        return v[pos++].value;
    }
    bool take_end() {
        if (pos < v.size() && v[pos].kind == OutKind::End) { ++pos; return true; }
        return false;
    }

    // left-corner recursion: d is the subderivation of the corner found so far
    Derivation lc(Derivation d) {
        for (;;) {
            int pi = rule();
            const auto& rhs = cfg.rules[pi].rhs;
            Derivation next{pi};
            next.insert(next.end(), d.begin(), d.end());
            for (size_t i = 1; i < rhs.size(); ++i)
                if (!rhs[i].terminal()) {
                    Derivation di = lc({});
                    next.insert(next.end(), di.begin(), di.end());
                }
            if (take_end()) return next;
            d = std::move(next);
        }
    }

    Derivation eps_lc(Derivation d) {
        for (;;) {
            int pi = rule();
            int m = marker();
            const auto& rhs = cfg.rules[pi].rhs;
            if (rhs.empty() ? m != 0 : m >= static_cast<int>(rhs.size())) malformed("marker out of range");
            Derivation rest;
            for (size_t i = rhs.empty() ? 0 : m + 1; i < rhs.size(); ++i)
                if (!rhs[i].terminal()) {
                    Derivation di = eps_lc({});
                    rest.insert(rest.end(), di.begin(), di.end());
                }
            Derivation next{pi};
            for (int j = 0; j < m; ++j) {
                Derivation dj = eps_td();
                next.insert(next.end(), dj.begin(), dj.end());
            }
            next.insert(next.end(), d.begin(), d.end());
            next.insert(next.end(), rest.begin(), rest.end());
            if (take_end()) return next;
            d = std::move(next);
        }
    }

    Derivation eps_td() {
        int pi = rule();
        Derivation d{pi};
        for (Sym x : cfg.rules[pi].rhs) {
            if (x.terminal()) malformed("terminal in an empty-string subderivation");
            Derivation di = eps_td();
            d.insert(d.end(), di.begin(), di.end());
        }
        return d;
    }
};

struct Tree {
    int rule;
    std::vector<Tree> kids;
};

void preorder(const Tree& t, Derivation& out) {
    out.push_back(t.rule);
    for (const Tree& k : t.kids) preorder(k, out);
}

// Rules in the order their subtrees are completed -> leftmost derivation.
Derivation from_postorder(const Cfg& cfg, const Output& v) {
    std::vector<Tree> stack;
    for (const OutSym& o : v) {
        if (o.kind != OutKind::Rule) malformed("unexpected marker in a bottom-up output");
        if (o.value < 0 || o.value >= static_cast<int>(cfg.rules.size())) malformed("unknown rule");
        const Rule& r = cfg.rules[o.value];
        std::vector<int> want;
        for (Sym x : r.rhs)
            if (!x.terminal()) want.push_back(x.index);
        if (stack.size() < want.size()) malformed("rule " + r.id + " completes before its children");
        Tree t{o.value, {}};
        t.kids.assign(std::make_move_iterator(stack.end() - want.size()), std::make_move_iterator(stack.end()));
        stack.resize(stack.size() - want.size());
        for (size_t i = 0; i < want.size(); ++i)
            if (cfg.rules[t.kids[i].rule].lhs != want[i]) malformed("child of " + r.id + " has the wrong left-hand side");
        stack.push_back(std::move(t));
    }
    if (stack.size() != 1 || cfg.rules[stack[0].rule].lhs != cfg.start) malformed("output does not form one tree");
    Derivation d;
    preorder(stack[0], d);
    return d;
}

} // namespace

Derivation map_output(StrategyKind kind, const Cfg& cfg, const Output& v) {
    switch (kind) {
    case StrategyKind::TopDown:
        for (const OutSym& o : v)
            if (o.kind != OutKind::Rule) malformed("top-down output holds only rules");
        return overline(v);
    case StrategyKind::LeftCorner: {
        OutputReader rd{cfg, v};
        Derivation d = rd.lc({});
        if (rd.pos != v.size()) malformed("trailing output");
        return d;
    }
    case StrategyKind::EpsLeftCorner: {
        OutputReader rd{cfg, v};
        Derivation d = rd.eps_lc({});
        if (rd.pos != v.size()) malformed("trailing output");
        return d;
    }
    case StrategyKind::Plr:
    case StrategyKind::Elr:
    case StrategyKind::Lr0: return from_postorder(cfg, v);
    }
    malformed("unknown strategy");
}

ContractReport verify_strategy_contract(StrategyKind kind, const Cfg& cfg, int max_steps) {
    ContractReport rep;
    Pdt pdt = construct(kind, cfg);
    std::map<Word, std::vector<Derivation>> by_word;
    enumerate_derivations(cfg, max_steps, [&](const Derivation& d, const Word& w) { by_word[w].push_back(d); });
    for (auto& [w, derivs] : by_word) {
        std::vector<Derivation> mapped;
        bool bad = false;
        auto stats = enumerate_computations(pdt, w, max_steps, true, [&](const Computation& c, const Configuration& end) {
            try {
                Derivation d = map_output(kind, cfg, end.output);
                auto a = overline(end.output), b = d;
                std::sort(a.begin(), a.end());
                std::sort(b.begin(), b.end());
                if (a != b) {
                    rep.violations.push_back("'" + word_text(cfg, w) + "': rule occurrences differ for " +
                                             pdt.output_text(end.output));
                    bad = true;
                }
                if (derivation_yield(cfg, d, "map_output") != w) {
                    rep.violations.push_back("'" + word_text(cfg, w) + "': derivation " + derivation_text(cfg, d) +
                                             " derives another string");
                    bad = true;
                }
                mapped.push_back(std::move(d));
            } catch (const Error& e) {
                rep.violations.push_back("'" + word_text(cfg, w) + "': " + e.what());
                bad = true;
            }
            (void)c;
        });
        if (stats.truncated) {
            ++rep.strings_skipped;
            continue;
        }
        ++rep.strings_checked;
        std::sort(mapped.begin(), mapped.end());
        bool dup = std::adjacent_find(mapped.begin(), mapped.end()) != mapped.end();
        // derivations of w may need more rules than the bound allowed above
        std::vector<Derivation> all;
        enumerate_derivations(cfg, max_steps, [&](const Derivation& d, const Word&) { all.push_back(d); }, &w);
        std::sort(all.begin(), all.end());
        if (dup) rep.violations.push_back("'" + word_text(cfg, w) + "': two computations map to one derivation");
        if (!dup && mapped != all)
            rep.violations.push_back("'" + word_text(cfg, w) + "': " + std::to_string(mapped.size()) +
                                     " computations for " + std::to_string(all.size()) + " derivations");
        if (dup || mapped != all) bad = true;
        if (!bad) rep.pairs += static_cast<int>(mapped.size());
    }
    rep.ok = rep.violations.empty();
    return rep;
}

} // namespace probstrat
