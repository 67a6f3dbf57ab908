#include "probstrat/io.hpp"
#include "probstrat/lifting.hpp"
#include "probstrat/prefix.hpp"
#include "probstrat/properties.hpp"
#include "probstrat/strategies.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace probstrat;

namespace {

struct Globals {
    double tolerance = 1e-12;
    int max_iter = 10000;
    int max_steps = 40;
};

bool looks_like_automaton(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        auto p = line.find_first_not_of(" \t");
        if (p == std::string::npos || line[p] == '#') continue;
        std::string head = line.substr(p, line.find_first_of(" \t", p) - p);
        return head != "rule" && head != "start";
    }
    return false;
}

Ppdt load_ppdt(const std::string& path) {
    auto doc = parse_automaton(read_text_file(path), path);
    if (!doc.prob) throw FormatError(path, "transition probabilities are required");
    return Ppdt{doc.pdt, *doc.prob};
}

void print_probability(const Prob& p) { std::cout << p.str() << "\n"; }

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Parsing strategies as push-down transducers, with probabilities"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--tolerance", g.tolerance, "fixed-point tolerance")->capture_default_str();
    app.add_option("--max-iter", g.max_iter, "fixed-point iteration limit")->capture_default_str();
    app.add_option("--max-steps", g.max_steps, "step bound for enumerations")->capture_default_str();

    std::string strategy, in_path, out_path, corpus_path, input;
    std::vector<std::string> probes;
    bool want_cpp = false, want_spp = false, want_reduced = false, assume_consistent = false;

    auto* construct_cmd = app.add_subcommand("construct", "build a strategy's automaton from a grammar");
    construct_cmd->add_option("--strategy", strategy)->required();
    construct_cmd->add_option("grammar", in_path)->required();
    construct_cmd->add_option("-o,--output", out_path)->required();

    auto* check_cmd = app.add_subcommand("check", "decide CPP, SPP and reducedness of an automaton");
    check_cmd->add_flag("--cpp", want_cpp);
    check_cmd->add_flag("--spp", want_spp);
    check_cmd->add_flag("--reduced", want_reduced);
    check_cmd->add_option("automaton", in_path)->required();

    auto* lift_cmd = app.add_subcommand("lift", "probabilistic automaton for a PCFG and strategy");
    lift_cmd->add_option("--strategy", strategy)->required();
    lift_cmd->add_option("pcfg", in_path)->required();
    lift_cmd->add_option("-o,--output", out_path)->required();

    auto* prob_cmd = app.add_subcommand("prob", "string probability under a probabilistic automaton");
    prob_cmd->add_option("ppdt", in_path)->required();
    prob_cmd->add_option("--input", input)->required();

    auto* prefix_cmd = app.add_subcommand("prefix", "prefix probability under a probabilistic automaton");
    prefix_cmd->add_option("ppdt", in_path)->required();
    prefix_cmd->add_option("--input", input)->required();
    prefix_cmd->add_flag("--assume-consistent", assume_consistent, "skip the consistency check");

    auto* estimate_cmd = app.add_subcommand("estimate", "relative-frequency estimate from a corpus");
    estimate_cmd->add_option("cfg", in_path)->required();
    estimate_cmd->add_option("corpus", corpus_path)->required();
    estimate_cmd->add_option("-o,--output", out_path)->required();

    auto* analyze_cmd = app.add_subcommand("analyze", "try to refute a probabilistic extension with probe pairs");
    analyze_cmd->add_option("--strategy", strategy)->required();
    analyze_cmd->add_option("pcfg", in_path)->required();
    analyze_cmd->add_option("--probe", probes)->required();

    auto* enumerate_cmd = app.add_subcommand("enumerate", "list derivations of a grammar or computations of an automaton");
    enumerate_cmd->add_option("file", in_path)->required();
    enumerate_cmd->add_option("--input", input, "input for automaton computations");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*construct_cmd) {
            auto doc = parse_grammar(read_text_file(in_path), in_path);
            Pdt p = construct(parse_kind(strategy), doc.cfg);
            write_text_file(out_path, write_automaton(p));
            std::cout << kind_name(parse_kind(strategy)) << ": " << p.symbol_count() << " stack symbols, " << p.size()
                      << " transitions\n";
            return 0;
        }
        if (*check_cmd) {
            if (!want_cpp && !want_spp && !want_reduced) want_cpp = want_spp = want_reduced = true;
            Pdt p = parse_automaton(read_text_file(in_path), in_path).pdt;
            if (!is_normal(p)) p = normalize(p);
            bool all = true;
            std::vector<std::string> parts, details;
            if (want_cpp) {
                auto r = check_cpp(p);
                all = all && r.holds;
                parts.push_back(std::string("CPP: ") + (r.holds ? "yes" : "no"));
                if (r.witness) {
                    std::string s = "dead computation:";
                    for (int t : r.witness->computation.steps) s += "\n  " + p.transition_text(t);
                    details.push_back(s);
                }
            }
            if (want_spp) {
                auto r = check_spp(p);
                all = all && r.holds;
                parts.push_back(std::string("SPP: ") + (r.holds ? "yes" : "no"));
                if (!r.holds) {
                    const auto& v = r.violations.front();
                    details.push_back(p.transition_text(v.push) + "\n  matched by " +
                                      p.transition_text(v.pop1) + "\n  and by " + p.transition_text(v.pop2));
                }
            }
            if (want_reduced) {
                auto r = is_reduced_pdt(p);
                all = all && r.reduced;
                parts.push_back(std::string("reduced: ") + (r.reduced ? "yes" : "no"));
                for (int t : r.unused) details.push_back("unused: " + p.transition_text(t));
            }
            for (size_t i = 0; i < parts.size(); ++i) std::cout << (i ? ", " : "") << parts[i];
            std::cout << "\n";
            for (auto& d : details) std::cout << d << "\n";
            return all ? 0 : 1;
        }
        if (*lift_cmd) {
            Pcfg pg = to_pcfg(parse_grammar(read_text_file(in_path), in_path), in_path);
            auto lifted = lift(pg, parse_kind(strategy), g.tolerance, g.max_iter);
            write_text_file(out_path, write_automaton(lifted.ppdt.pdt, &lifted.ppdt.prob));
            std::cout << kind_name(parse_kind(strategy)) << ": " << lifted.ppdt.pdt.size() << " transitions, "
                      << (lifted.exact ? "exact" : "approx") << " probabilities\n";
            return 0;
        }
        if (*prob_cmd) {
            Ppdt a = load_ppdt(in_path);
            print_probability(string_probability_ppdt(a, parse_input(a.pdt.input_alphabet, input), g.tolerance, g.max_iter));
            return 0;
        }
        if (*prefix_cmd) {
            Ppdt a = load_ppdt(in_path);
            PrefixOptions opt{assume_consistent, g.tolerance, g.max_iter};
            auto r = prefix_probability(a, parse_input(a.pdt.input_alphabet, input), opt);
            for (auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
            print_probability(r.value);
            return 0;
        }
        if (*estimate_cmd) {
            auto doc = parse_grammar(read_text_file(in_path), in_path);
            Corpus c = parse_corpus(doc.cfg, read_text_file(corpus_path), corpus_path);
            Pcfg pg = mle_estimate(doc.cfg, c);
            write_text_file(out_path, write_grammar(pg.cfg, &pg.prob));
            for (size_t r = 0; r < pg.cfg.rules.size(); ++r)
                std::cout << pg.cfg.rules[r].id << " " << pg.prob[r].str() << "\n";
            return 0;
        }
        if (*analyze_cmd) {
            Pcfg pg = to_pcfg(parse_grammar(read_text_file(in_path), in_path), in_path);
            std::vector<Word> words;
            for (auto& s : probes) words.push_back(parse_input(pg.cfg.terminals, s));
            StrategyKind kind = parse_kind(strategy);
            auto v = feasibility_analysis(pg, kind, words, std::max(g.max_steps, 400));
            Pdt p = construct(kind, pg.cfg);
            for (const auto& r : v.ratios) {
                std::cout << "'" << word_text(pg.cfg, r.first) << "' / '" << word_text(pg.cfg, r.second)
                          << "': grammar ratio " << to_string(r.grammar_ratio);
                if (r.forced()) std::cout << ", forced automaton ratio 1\n";
                else std::cout << ", automaton ratio " << monomial_text(p, r.numerator) << " / "
                               << monomial_text(p, r.denominator) << "\n";
            }
            std::cout << (v.infeasible ? "infeasible" : "not refuted by these probes") << "\n";
            for (auto& c : v.conflicts) std::cout << "  " << c << "\n";
            if (v.infeasible) std::cout << v.explanation << "\n";
            return v.infeasible ? 1 : 0;
        }
        if (*enumerate_cmd) {
            std::string text = read_text_file(in_path);
            if (looks_like_automaton(text)) {
                auto doc = parse_automaton(text, in_path);
                Pdt p = is_normal(doc.pdt) ? doc.pdt : normalize(doc.pdt);
                Word w = parse_input(p.input_alphabet, input);
                long count = 0;
                auto stats = enumerate_computations(p, w, g.max_steps, true, [&](const Computation& c, const Configuration& end) {
                    ++count;
                    std::cout << "computation " << count << " (" << c.steps.size() << " steps), output "
                              << p.output_text(end.output);
                    if (doc.prob) {
                        Ppdt a{p, *doc.prob};
                        if (a.prob.size() == p.transitions.size()) std::cout << ", p = " << computation_probability(a, c).str();
                    }
                    std::cout << "\n";
                });
                std::cout << count << " complete computations" << (stats.truncated ? " (step bound reached)" : "") << "\n";
            } else {
                auto doc = parse_grammar(text, in_path);
                long count = 0;
                enumerate_derivations(doc.cfg, g.max_steps, [&](const Derivation& d, const Word& w) {
                    ++count;
                    std::cout << derivation_text(doc.cfg, d) << "  =>  '" << word_text(doc.cfg, w) << "'";
                    if (doc.prob) std::cout << "  p = " << derivation_probability(Pcfg{doc.cfg, *doc.prob}, d).str();
                    std::cout << "\n";
                });
                std::cout << count << " derivations\n";
            }
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
