#include "probstrat/io.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace probstrat {

namespace {

enum class Quote { None, Single, Double };

struct Token {
    std::string text;
    Quote quote = Quote::None;
    bool is(const char* s) const { return quote == Quote::None && text == s; }
};

// Splits a line into tokens. Whitespace separates, ':' stands alone, '#'
// starts a comment, and quoted tokens keep everything up to the closing
// quote (backslash escapes the next character).
std::vector<Token> tokenize(const std::string& line, const std::string& where, int lineno) {
    std::vector<Token> out;
    size_t i = 0;
    auto fail = [&](const std::string& why) {
        throw FormatError(where, "line " + std::to_string(lineno) + ": " + why);
    };
    while (i < line.size()) {
        char c = line[i];
        if (std::isspace(static_cast<unsigned char>(c))) { ++i; continue; }
        if (c == '#') break;
        if (c == ':') { out.push_back({":", Quote::None}); ++i; continue; }
        if (c == '\'' || c == '"') {
            Token t{"", c == '\'' ? Quote::Single : Quote::Double};
            ++i;
            for (;;) {
                if (i >= line.size()) fail("unterminated quote");
                if (line[i] == '\\' && i + 1 < line.size()) { t.text += line[i + 1]; i += 2; continue; }
                if (line[i] == c) { ++i; break; }
                t.text += line[i++];
            }
            out.push_back(std::move(t));
            continue;
        }
        Token t;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) && line[i] != ':' &&
               line[i] != '#' && line[i] != '\'' && line[i] != '"')
            t.text += line[i++];
        out.push_back(std::move(t));
    }
    return out;
}

bool plain(const std::string& s) {
    static const std::set<std::string> reserved{"eps", "->", "/", ":", "-|", "push", "pop", "swap",
                                                "pushswap", "popswap", "rule", "start", "init", "final",
                                                "states", "inalpha", "outalpha"};
    if (s.empty() || reserved.count(s)) return false;
    if (s[0] == '^' || s[0] == '~') return false;
    for (char c : s)
        if (std::isspace(static_cast<unsigned char>(c)) || c == '\'' || c == '"' || c == '#' || c == ':' || c == '\\')
            return false;
    return true;
}

std::string quoted(const std::string& s, char q) {
    std::string out(1, q);
    for (char c : s) {
        if (c == q || c == '\\') out += '\\';
        out += c;
    }
    return out + q;
}

std::string name_token(const std::string& s) { return plain(s) ? s : quoted(s, '"'); }

bool upper_initial(const std::string& s) { return !s.empty() && std::isupper(static_cast<unsigned char>(s[0])); }

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

template <class T>
int index_in(std::vector<std::string>& names, std::map<std::string, int>& idx, const std::string& name) {
    auto it = idx.find(name);
    if (it != idx.end()) return it->second;
    names.push_back(name);
    idx.emplace(name, static_cast<int>(names.size()) - 1);
    return static_cast<int>(names.size()) - 1;
}

} // namespace

// ---------------------------------------------------------------- grammars

GrammarDoc parse_grammar(const std::string& text, const std::string& where) {
    GrammarDoc doc;
    Cfg& g = doc.cfg;
    std::map<std::string, int> tidx, nidx;
    std::map<std::string, bool> ids;
    std::vector<std::optional<Prob>> probs;
    std::string start;
    int lineno = 0;
    for (const std::string& line : lines_of(text)) {
        ++lineno;
        auto toks = tokenize(line, where, lineno);
        if (toks.empty()) continue;
        auto fail = [&](const std::string& why) {
            throw FormatError(where, "line " + std::to_string(lineno) + ": " + why);
        };
        if (toks[0].is("start")) {
            if (toks.size() != 2 || toks[1].quote == Quote::Single) fail("expected 'start <Nonterminal>'");
            if (!start.empty()) fail("second start line");
            start = toks[1].text;
            index_in<int>(g.nonterminals, nidx, start);
            continue;
        }
        if (!toks[0].is("rule")) fail("unknown line '" + toks[0].text + "'");
        if (toks.size() < 5 || !toks[2].is(":") || !toks[4].is("->")) fail("expected 'rule <id>: <A> -> ...'");
        Rule r;
        r.id = toks[1].text;
        if (ids[r.id]) fail("duplicate rule id " + r.id);
        ids[r.id] = true;
        if (toks[3].quote == Quote::Single || (toks[3].quote == Quote::None && !upper_initial(toks[3].text)))
            fail("left-hand side must be a nonterminal");
        r.lhs = index_in<int>(g.nonterminals, nidx, toks[3].text);
        size_t i = 5;
        bool eps = false;
        for (; i < toks.size() && !toks[i].is(":"); ++i) {
            const Token& t = toks[i];
            if (t.is("eps")) { eps = true; continue; }
            bool nonterminal = t.quote == Quote::Double || (t.quote == Quote::None && upper_initial(t.text));
            if (nonterminal) r.rhs.push_back(Sym{SymKind::Nonterminal, index_in<int>(g.nonterminals, nidx, t.text)});
            else r.rhs.push_back(Sym{SymKind::Terminal, index_in<int>(g.terminals, tidx, t.text)});
        }
        if (eps && !r.rhs.empty()) fail("'eps' mixed with symbols");
        if (!eps && r.rhs.empty()) fail("empty right-hand side must be written 'eps'");
        std::optional<Prob> p;
        if (i < toks.size()) {
            if (i + 2 != toks.size()) fail("expected one probability after ':'");
            try {
                p = parse_prob(toks[i + 1].text);
            } catch (const FormatError& e) {
                fail(e.what());
            }
            if (p->exact() ? (p->rational() < 0 || p->rational() > 1) : (p->to_double() < 0 || p->to_double() > 1))
                fail("probability outside [0,1]");
        }
        g.rules.push_back(std::move(r));
        probs.push_back(p);
    }
    if (g.rules.empty()) throw FormatError(where, "no rules");
    if (start.empty()) start = g.nonterminals[g.rules[0].lhs];
    g.start = nidx.at(start);
    size_t with = 0;
    for (auto& p : probs) with += p.has_value();
    if (with != 0 && with != probs.size()) throw FormatError(where, "probabilities must be given for all rules or none");
    if (with) {
        doc.prob.emplace();
        for (auto& p : probs) doc.prob->push_back(*p);
    }
    check_well_formed(g, true, where);
    return doc;
}

std::string write_grammar(const Cfg& cfg, const std::vector<Prob>* prob) {
    auto nt = [&](const std::string& s) { return plain(s) && upper_initial(s) ? s : quoted(s, '"'); };
    auto t = [&](const std::string& s) { return plain(s) && !upper_initial(s) ? s : quoted(s, '\''); };
    std::string out = "start " + nt(cfg.nonterminals[cfg.start]) + "\n";
    for (size_t i = 0; i < cfg.rules.size(); ++i) {
        const Rule& r = cfg.rules[i];
        out += "rule " + name_token(r.id) + ": " + nt(cfg.nonterminals[r.lhs]) + " ->";
        if (r.rhs.empty()) out += " eps";
        for (Sym s : r.rhs) out += " " + (s.terminal() ? t(cfg.terminals[s.index]) : nt(cfg.nonterminals[s.index]));
        if (prob) out += " : " + (*prob)[i].serialize();
        out += "\n";
    }
    return out;
}

Pcfg to_pcfg(const GrammarDoc& doc, const std::string& where) {
    if (!doc.prob) throw FormatError(where, "rule probabilities are required");
    return Pcfg{doc.cfg, *doc.prob};
}

// ---------------------------------------------------------------- automata

AutomatonDoc parse_automaton(const std::string& text, const std::string& where) {
    AutomatonDoc doc;
    Pdt& p = doc.pdt;
    bool have_in = false, have_out = false;
    std::string init, final;
    std::vector<std::optional<Prob>> probs;
    std::map<std::string, int> in_idx, out_idx;
    int lineno = 0;
    for (const std::string& line : lines_of(text)) {
        ++lineno;
        auto toks = tokenize(line, where, lineno);
        if (toks.empty()) continue;
        auto fail = [&](const std::string& why) {
            throw FormatError(where, "line " + std::to_string(lineno) + ": " + why);
        };
        const Token& head = toks[0];
        auto rest_names = [&]() {
            std::vector<std::string> v;
            for (size_t i = 1; i < toks.size(); ++i) v.push_back(toks[i].text);
            return v;
        };
        if (head.is("inalpha")) {
            if (have_in) fail("second inalpha line");
            have_in = true;
            for (auto& s : rest_names()) index_in<int>(p.input_alphabet, in_idx, s);
            continue;
        }
        if (head.is("outalpha")) {
            if (have_out) fail("second outalpha line");
            have_out = true;
            for (auto& s : rest_names()) index_in<int>(p.rule_alphabet, out_idx, s);
            continue;
        }
        if (head.is("states")) {
            for (auto& s : rest_names()) p.intern(s);
            continue;
        }
        if (head.is("init") || head.is("final")) {
            if (toks.size() != 2) fail("expected one symbol");
            (head.is("init") ? init : final) = toks[1].text;
            p.intern(toks[1].text);
            continue;
        }
        // transitions; an optional trailing ": prob"
        std::optional<Prob> prob;
        size_t end = toks.size();
        auto arrow = std::find_if(toks.begin(), toks.end(), [](const Token& t) { return t.is("->"); });
        if (arrow == toks.end()) fail("missing '->'");
        size_t a = static_cast<size_t>(arrow - toks.begin());
        for (size_t i = a + 1; i < toks.size(); ++i)
            if (toks[i].is(":")) {
                if (i + 2 != toks.size()) fail("expected one probability after ':'");
                try {
                    prob = parse_prob(toks[i + 1].text);
                } catch (const FormatError& e) {
                    fail(e.what());
                }
                end = i;
                break;
            }
        auto sym = [&](size_t i) { return p.intern(toks[i].text); };
        auto terminal = [&](const Token& t) {
            if (t.is("eps")) return -1;
            auto it = in_idx.find(t.text);
            if (it != in_idx.end()) return it->second;
            if (have_in) fail("input symbol '" + t.text + "' not in inalpha");
            return index_in<int>(p.input_alphabet, in_idx, t.text);
        };
        auto output = [&](size_t from, size_t to) {
            Output o;
            if (to == from + 1 && toks[from].is("eps")) return o;
            for (size_t i = from; i < to; ++i) {
                const Token& t = toks[i];
                if (t.is("-|")) { o.push_back(OutSym::end()); continue; }
                if (t.quote == Quote::None && t.text.size() > 1 && t.text[0] == '^') {
                    try {
                        o.push_back(OutSym::marker(std::stoi(t.text.substr(1))));
                    } catch (const std::exception&) {
                        fail("bad marker " + t.text);
                    }
                    continue;
                }
                auto it = out_idx.find(t.text);
                if (it == out_idx.end()) {
                    if (have_out) fail("output symbol '" + t.text + "' not in outalpha");
                    o.push_back(OutSym::rule(index_in<int>(p.rule_alphabet, out_idx, t.text)));
                } else {
                    o.push_back(OutSym::rule(it->second));
                }
            }
            return o;
        };
        // "X / x : y... ->" starting at position i; returns (input, output)
        auto io_part = [&](size_t i) {
            if (i + 2 >= a || !toks[i].is("/") || !toks[i + 2].is(":")) fail("expected '/ <input> : <outputs>'");
            int in = terminal(toks[i + 1]);
            if (i + 3 >= a) fail("missing output (write 'eps' for none)");
            return std::make_pair(in, output(i + 3, a));
        };
        if (head.is("push")) {
            if (a != 2 || end != a + 3 || toks[1].text != toks[a + 1].text) fail("expected 'push X -> X Y'");
            p.push(sym(1), sym(a + 2));
        } else if (head.is("pop")) {
            if (a != 3 || end != a + 2) fail("expected 'pop Y X -> Z'");
            p.pop(sym(1), sym(2), sym(a + 1));
        } else if (head.is("swap")) {
            if (end != a + 2) fail("expected one target symbol");
            auto [in, out] = io_part(2);
            p.swap(sym(1), in, out, sym(a + 1));
        } else if (head.is("pushswap")) {
            if (end != a + 2) fail("expected one target symbol");
            auto [in, out] = io_part(2);
            p.push_swap(sym(1), in, out, sym(a + 1));
        } else if (head.is("popswap")) {
            if (end != a + 2) fail("expected one target symbol");
            auto [in, out] = io_part(3);
            p.pop_swap(sym(1), sym(2), in, out, sym(a + 1));
        } else {
            fail("unknown line '" + head.text + "'");
        }
        probs.push_back(prob);
    }
    if (init.empty() || final.empty()) throw FormatError(where, "init and final lines are required");
    p.init = p.symbol_index(init);
    p.final = p.symbol_index(final);
    size_t with = 0;
    for (auto& q : probs) with += q.has_value();
    if (with != 0 && with != probs.size())
        throw FormatError(where, "probabilities must be given for all transitions or none");
    if (with) {
        doc.prob.emplace();
        for (auto& q : probs) doc.prob->push_back(*q);
    }
    return doc;
}

std::string write_automaton(const Pdt& pdt, const std::vector<Prob>* prob) {
    std::string out = "inalpha";
    for (auto& s : pdt.input_alphabet) out += " " + name_token(s);
    out += "\noutalpha";
    for (auto& s : pdt.rule_alphabet) out += " " + name_token(s);
    out += "\nstates";
    for (auto& s : pdt.symbols()) out += " " + name_token(s);
    out += "\ninit " + name_token(pdt.symbol_name(pdt.init));
    out += "\nfinal " + name_token(pdt.symbol_name(pdt.final)) + "\n";
    auto io = [&](const Transition& t) {
        std::string s = " / " + (t.input < 0 ? std::string("eps") : name_token(pdt.input_alphabet[t.input])) + " :";
        if (t.output.empty()) s += " eps";
        for (const OutSym& o : t.output) {
            if (o.kind == OutKind::End) s += " -|";
            else if (o.kind == OutKind::Marker) s += " ^" + std::to_string(o.value);
            else s += " " + name_token(pdt.rule_alphabet[o.value]);
        }
        return s;
    };
    for (size_t i = 0; i < pdt.transitions.size(); ++i) {
        const Transition& t = pdt.transitions[i];
        auto n = [&](int s) { return name_token(pdt.symbol_name(s)); };
        switch (t.kind) {
        case TransKind::Push: out += "push " + n(t.top) + " -> " + n(t.top) + " " + n(t.target); break;
        case TransKind::Pop: out += "pop " + n(t.below) + " " + n(t.top) + " -> " + n(t.target); break;
        case TransKind::Swap: out += "swap " + n(t.top) + io(t) + " -> " + n(t.target); break;
        case TransKind::PushSwap: out += "pushswap " + n(t.top) + io(t) + " -> " + n(t.target); break;
        case TransKind::PopSwap: out += "popswap " + n(t.below) + " " + n(t.top) + io(t) + " -> " + n(t.target); break;
        }
        if (prob) out += " : " + (*prob)[i].serialize();
        out += "\n";
    }
    return out;
}

// ---------------------------------------------------------------- corpora and inputs

Corpus parse_corpus(const Cfg& cfg, const std::string& text, const std::string& where) {
    Corpus corpus;
    int lineno = 0;
    for (const std::string& line : lines_of(text)) {
        ++lineno;
        auto toks = tokenize(line, where, lineno);
        if (toks.empty()) continue;
        Derivation d;
        for (const Token& t : toks) {
            int r = cfg.rule_index(t.text);
            if (r < 0) throw FormatError(where, "line " + std::to_string(lineno) + ": unknown rule id '" + t.text + "'");
            d.push_back(r);
        }
        corpus.push_back(std::move(d));
    }
    return corpus;
}

Word parse_input(const std::vector<std::string>& alphabet, const std::string& text) {
    Word w;
    std::istringstream in(text);
    std::string tok;
    while (in >> tok) {
        auto it = std::find(alphabet.begin(), alphabet.end(), tok);
        w.push_back(it == alphabet.end() ? -1 : static_cast<int>(it - alphabet.begin()));
    }
    return w;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(path, "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError(path, "cannot write file");
    out << text;
}

} // namespace probstrat
