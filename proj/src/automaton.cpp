#include "probstrat/automaton.hpp"

#include <algorithm>
#include <array>
#include <tuple>

namespace probstrat {

int Pdt::symbol_index(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
}

int Pdt::intern(const std::string& name) {
    auto [it, fresh] = index_.emplace(name, static_cast<int>(symbols_.size()));
    if (fresh) symbols_.push_back(name);
    return it->second;
}

int Pdt::add(Transition t) {
    const int n = symbol_count();
    auto ok = [n](int s) { return s >= 0 && s < n; };
    bool pops = t.kind == TransKind::Pop || t.kind == TransKind::PopSwap;
    if (!ok(t.top) || !ok(t.target) || (pops && !ok(t.below)))
        throw Error("pdt", "BadTransition", "transition refers to an unknown stack symbol");
    if (t.input >= static_cast<int>(input_alphabet.size()))
        throw Error("pdt", "BadTransition", "transition reads an unknown input symbol");
    transitions.push_back(std::move(t));
    return static_cast<int>(transitions.size()) - 1;
}

int Pdt::push(int x, int y, std::string label) {
    return add({TransKind::Push, x, -1, y, -1, {}, std::move(label)});
}
int Pdt::pop(int below, int top, int z, std::string label) {
    return add({TransKind::Pop, top, below, z, -1, {}, std::move(label)});
}
int Pdt::swap(int x, int input, Output out, int y, std::string label) {
    return add({TransKind::Swap, x, -1, y, input, std::move(out), std::move(label)});
}
int Pdt::push_swap(int x, int input, Output out, int y, std::string label) {
    return add({TransKind::PushSwap, x, -1, y, input, std::move(out), std::move(label)});
}
int Pdt::pop_swap(int below, int top, int input, Output out, int z, std::string label) {
    return add({TransKind::PopSwap, top, below, z, input, std::move(out), std::move(label)});
}

std::string Pdt::output_text(const Output& out) const {
    if (out.empty()) return "eps";
    std::string s;
    for (const OutSym& o : out) {
        if (!s.empty()) s += ' ';
        switch (o.kind) {
        case OutKind::Rule: s += rule_alphabet.at(o.value); break;
        case OutKind::End: s += "-|"; break;
        case OutKind::Marker: s += "^" + std::to_string(o.value); break;
        }
    }
    return s;
}

std::string Pdt::transition_text(int id) const {
    const Transition& t = transitions.at(id);
    auto in = [&] { return t.input < 0 ? std::string("eps") : input_alphabet[t.input]; };
    const std::string& x = symbols_[t.top];
    switch (t.kind) {
    case TransKind::Push: return "push " + x + " -> " + x + " " + symbols_[t.target];
    case TransKind::Pop: return "pop " + symbols_[t.below] + " " + x + " -> " + symbols_[t.target];
    case TransKind::Swap: return "swap " + x + " / " + in() + " : " + output_text(t.output) + " -> " + symbols_[t.target];
    case TransKind::PushSwap:
        return "pushswap " + x + " / " + in() + " : " + output_text(t.output) + " -> " + x + " " + symbols_[t.target];
    case TransKind::PopSwap:
        return "popswap " + symbols_[t.below] + " " + x + " / " + in() + " : " + output_text(t.output) + " -> " +
               symbols_[t.target];
    }
    return {};
}

namespace {

enum Category { CatPush = 0, CatPop = 1, CatScan = 2, CatSwap = 3 };
const char* const kCategorySuffix[] = {"_push", "_pop", "_scan", "_swap"};

Category category(const Transition& t) {
    switch (t.kind) {
    case TransKind::Push:
    case TransKind::PushSwap: return CatPush;
    case TransKind::Pop:
    case TransKind::PopSwap: return CatPop;
    case TransKind::Swap: return t.input >= 0 ? CatScan : CatSwap;
    }
    return CatSwap;
}

bool in_lhs(const Transition& t, int s) {
    bool pops = t.kind == TransKind::Pop || t.kind == TransKind::PopSwap;
    return t.top == s || (pops && t.below == s);
}

std::string fresh_name(const Pdt& pdt, std::string name) {
    while (pdt.symbol_index(name) >= 0) name += "'";
    return name;
}

} // namespace

bool is_normal(const Pdt& pdt) {
    std::vector<int> seen(pdt.symbol_count(), -1);
    for (const Transition& t : pdt.transitions) {
        if (t.kind == TransKind::PushSwap || t.kind == TransKind::PopSwap) return false;
        if (in_lhs(t, pdt.final)) return false;
        int c = category(t);
        if (seen[t.top] >= 0 && seen[t.top] != c) return false;
        seen[t.top] = c;
    }
    return true;
}

Pdt normalize(const Pdt& raw) {
    Pdt out(raw.input_alphabet, raw.rule_alphabet);
    for (const auto& s : raw.symbols()) out.intern(s);
    out.init = raw.init;
    out.final = raw.final;

    // shorthand expansion, sharing the intermediate symbol per (target, x, y)
    std::map<std::tuple<int, int, Output>, int> shared;
    auto intermediate = [&](const Transition& t) {
        auto key = std::make_tuple(t.target, t.input, t.output);
        auto it = shared.find(key);
        if (it != shared.end()) return it->second;
        std::string in = t.input < 0 ? "eps" : raw.input_alphabet[t.input];
        int s = out.intern(fresh_name(out, raw.symbol_name(t.target) + "{" + in + "," + raw.output_text(t.output) + "}"));
        out.swap(s, t.input, t.output, t.target, t.label);
        shared.emplace(key, s);
        return s;
    };
    std::vector<Transition> plain;
    for (const Transition& t : raw.transitions) {
        if (t.kind == TransKind::PushSwap) {
            plain.push_back({TransKind::Push, t.top, -1, intermediate(t), -1, {}, t.label});
        } else if (t.kind == TransKind::PopSwap) {
            plain.push_back({TransKind::Pop, t.top, t.below, intermediate(t), -1, {}, t.label});
        } else {
            plain.push_back(t);
        }
    }
    // intermediate swaps were added to out directly; move them after the plain ones
    std::vector<Transition> expanded = std::move(plain);
    for (const Transition& t : out.transitions) expanded.push_back(t);
    out.transitions.clear();

    if (std::any_of(expanded.begin(), expanded.end(), [&](const Transition& t) { return in_lhs(t, raw.final); })) {
        int f = out.intern(fresh_name(out, raw.symbol_name(raw.final) + "_final"));
        expanded.push_back({TransKind::Swap, raw.final, -1, f, -1, {}, {}});
        out.final = f;
    }

    const int n = out.symbol_count();
    std::vector<std::array<bool, 4>> has(n, {false, false, false, false});
    for (const Transition& t : expanded) has[t.top][category(t)] = true;
    std::vector<std::array<int, 4>> variant(n, {-1, -1, -1, -1});
    std::vector<bool> split(n, false);
    for (int s = 0; s < n; ++s) {
        int kinds = static_cast<int>(std::count(has[s].begin(), has[s].end(), true));
        if (kinds < 2) continue;
        split[s] = true;
        for (int c = 0; c < 4; ++c)
            if (has[s][c]) variant[s][c] = out.intern(fresh_name(out, out.symbol_name(s) + kCategorySuffix[c]));
    }
    for (Transition t : expanded) {
        if (split[t.top]) t.top = variant[t.top][category(t)];
        if (t.kind == TransKind::Pop && split[t.below] && variant[t.below][CatPush] >= 0)
            t.below = variant[t.below][CatPush];
        out.add(std::move(t));
    }
    for (int s = 0; s < n; ++s)
        if (split[s])
            for (int c = 0; c < 4; ++c)
                if (variant[s][c] >= 0) out.swap(s, -1, {}, variant[s][c]);
    return out;
}

TransitionGroups transition_groups(const Pdt& pdt) {
    TransitionGroups g;
    g.group_of.assign(pdt.transitions.size(), -1);
    std::map<std::tuple<int, int, int>, int> key_to_group;
    for (size_t i = 0; i < pdt.transitions.size(); ++i) {
        const Transition& t = pdt.transitions[i];
        int cat = category(t);
        if (cat == CatScan) cat = CatSwap; // swaps of a symbol form one group
        auto key = std::make_tuple(cat, t.top, cat == CatPop ? t.below : -1);
        auto [it, fresh] = key_to_group.emplace(key, static_cast<int>(g.groups.size()));
        if (fresh) g.groups.emplace_back();
        g.groups[it->second].push_back(static_cast<int>(i));
        g.group_of[i] = it->second;
    }
    return g;
}

ProperReport check_proper(const Ppdt& ppdt, double tolerance) {
    ProperReport rep;
    const Pdt& pdt = ppdt.pdt;
    if (ppdt.prob.size() != pdt.transitions.size()) {
        rep.proper = false;
        rep.violations.push_back("probability table size differs from transition count");
        return rep;
    }
    for (size_t i = 0; i < ppdt.prob.size(); ++i)
        if (ppdt.prob[i].to_double() < -tolerance || ppdt.prob[i].to_double() > 1 + tolerance) {
            rep.proper = false;
            rep.violations.push_back("probability outside [0,1]: " + pdt.transition_text(static_cast<int>(i)));
        }
    auto groups = transition_groups(pdt);
    for (const auto& grp : groups.groups) {
        Prob sum(0);
        for (int t : grp) sum += ppdt.prob[t];
        if (!approx_equal(sum, Prob(1), tolerance)) {
            rep.proper = false;
            rep.violations.push_back("group of " + pdt.transition_text(grp.front()) + " sums to " + sum.str());
        }
    }
    return rep;
}

bool applicable(const Pdt& pdt, const Transition& t, const Configuration& c, const Word& input) {
    const auto& st = c.stack;
    if (st.empty() || st.back() != t.top) return false;
    bool pops = t.kind == TransKind::Pop || t.kind == TransKind::PopSwap;
    if (pops && (st.size() < 2 || st[st.size() - 2] != t.below)) return false;
    if (t.input >= 0 && (c.position >= input.size() || input[c.position] != t.input)) return false;
    (void)pdt;
    return true;
}

namespace {

void apply(const Transition& t, Configuration& c) {
    switch (t.kind) {
    case TransKind::Push:
    case TransKind::PushSwap: c.stack.push_back(t.target); break;
    case TransKind::Pop:
    case TransKind::PopSwap:
        c.stack.pop_back();
        c.stack.back() = t.target;
        break;
    case TransKind::Swap: c.stack.back() = t.target; break;
    }
    if (t.input >= 0) ++c.position;
    c.output.insert(c.output.end(), t.output.begin(), t.output.end());
}

} // namespace

std::vector<Configuration> replay(const Pdt& pdt, const Word& input, const Computation& comp) {
    std::vector<Configuration> trace;
    Configuration c;
    c.stack = {pdt.init};
    trace.push_back(c);
    for (size_t i = 0; i < comp.steps.size(); ++i) {
        int id = comp.steps[i];
        if (id < 0 || id >= static_cast<int>(pdt.transitions.size()))
            throw Error("replay", "NotApplicable", "unknown transition at step " + std::to_string(i));
        const Transition& t = pdt.transitions[id];
        if (!applicable(pdt, t, c, input))
            throw Error("replay", "NotApplicable", pdt.transition_text(id) + " at step " + std::to_string(i));
        apply(t, c);
        trace.push_back(c);
    }
    return trace;
}

namespace {

struct Enumerator {
    const Pdt& pdt;
    const Word& input;
    int max_steps;
    bool complete_only;
    bool normal;
    const std::function<void(const Computation&, const Configuration&)>& emit;
    std::vector<std::vector<int>> by_top;
    EnumerationStats stats;
    Computation comp;
    Configuration conf;

    bool complete() const {
        return conf.stack.size() == 1 && conf.stack[0] == pdt.final && conf.position == input.size();
    }

    void run() {
        if (!complete_only || complete()) {
            emit(comp, conf);
            ++stats.emitted;
        }
        const int steps = static_cast<int>(comp.steps.size());
        for (int id : by_top[conf.stack.back()]) {
            const Transition& t = pdt.transitions[id];
            if (!applicable(pdt, t, conf, input)) continue;
            if (steps >= max_steps) { stats.truncated = true; return; }
            if (complete_only && normal) {
                // each symbol above the bottom needs a pop, each input symbol a scan
                size_t height = conf.stack.size() + (t.kind == TransKind::Push) - (t.kind == TransKind::Pop);
                size_t left = input.size() - conf.position - (t.input >= 0);
                if (steps + 1 + static_cast<long>(height - 1) + static_cast<long>(left) > max_steps) {
                    stats.truncated = true;
                    continue;
                }
            }
            size_t out_len = conf.output.size();
            size_t pos = conf.position;
            int top = conf.stack.back();
            int under = conf.stack.size() >= 2 ? conf.stack[conf.stack.size() - 2] : -1;
            apply(t, conf);
            comp.steps.push_back(id);
            run();
            comp.steps.pop_back();
            switch (t.kind) {
            case TransKind::Push:
            case TransKind::PushSwap: conf.stack.pop_back(); break;
            case TransKind::Pop:
            case TransKind::PopSwap:
                conf.stack.back() = under;
                conf.stack.push_back(top);
                break;
            case TransKind::Swap: conf.stack.back() = top; break;
            }
            conf.output.resize(out_len);
            conf.position = pos;
        }
    }
};

} // namespace

EnumerationStats enumerate_computations(const Pdt& pdt, const Word& input, int max_steps, bool complete_only,
                                        const std::function<void(const Computation&, const Configuration&)>& emit) {
    Enumerator e{pdt, input, max_steps, complete_only, is_normal(pdt), emit, {}, {}, {}, {}};
    e.by_top.resize(pdt.symbol_count());
    for (size_t i = 0; i < pdt.transitions.size(); ++i)
        e.by_top[pdt.transitions[i].top].push_back(static_cast<int>(i));
    e.conf.stack = {pdt.init};
    e.run();
    return e.stats;
}

std::vector<Computation> complete_computations(const Pdt& pdt, const Word& input, int max_steps) {
    std::vector<Computation> out;
    enumerate_computations(pdt, input, max_steps, true,
                           [&](const Computation& c, const Configuration&) { out.push_back(c); });
    return out;
}

Prob computation_probability(const Ppdt& ppdt, const Computation& c) {
    Prob p(1);
    for (int t : c.steps) p *= ppdt.prob.at(t);
    return p;
}

ProbMonomial monomial_of(const Computation& c) {
    ProbMonomial m;
    for (int t : c.steps) ++m[t];
    return m;
}

Prob evaluate(const ProbMonomial& m, const std::vector<Prob>& prob) {
    Prob p(1);
    for (auto [t, k] : m)
        for (int i = 0; i < k; ++i) p *= prob.at(t);
    return p;
}

std::string monomial_text(const Pdt& pdt, const ProbMonomial& m) {
    if (m.empty()) return "1";
    std::string s;
    for (auto [t, k] : m) {
        if (!s.empty()) s += " * ";
        s += "p[" + pdt.transition_text(t) + "]";
        if (k > 1) s += "^" + std::to_string(k);
    }
    return s;
}

std::vector<ProbMonomial> symbolic_string_probability(const Pdt& pdt, const Word& w, int max_steps) {
    std::vector<ProbMonomial> out;
    auto stats = enumerate_computations(pdt, w, max_steps, true, [&](const Computation& c, const Configuration&) {
        out.push_back(monomial_of(c));
    });
    if (stats.truncated)
        throw Error("symbolic_string_probability", "BoundExceeded",
                    std::to_string(out.size()) + " complete computations found before the step bound " +
                        std::to_string(max_steps) + " cut the search");
    return out;
}

Derivation overline(const Output& v) {
    Derivation d;
    for (const OutSym& o : v)
        if (o.kind == OutKind::Rule) d.push_back(o.value);
    return d;
}

} // namespace probstrat
