#pragma once

#include "probstrat/automaton.hpp"
#include "probstrat/grammar.hpp"

#include <optional>
#include <string>
#include <vector>

namespace probstrat {

// Grammar text:
//   start S
//   rule pi_S: S -> A B : 1
//   rule pi_E: A -> eps : 1/2
// Uppercase-initial identifiers are nonterminals, lowercase ones terminals.
// 'x y' quotes a terminal, "X y" a nonterminal. Probabilities are on every
// rule or on none.
struct GrammarDoc {
    Cfg cfg;
    std::optional<std::vector<Prob>> prob;
};

GrammarDoc parse_grammar(const std::string& text, const std::string& where = "grammar");
std::string write_grammar(const Cfg& cfg, const std::vector<Prob>* prob = nullptr);
Pcfg to_pcfg(const GrammarDoc& doc, const std::string& where = "grammar"); // requires probabilities

// Automaton text:
//   inalpha a b
//   outalpha pi_S pi_A
//   states X Y Z
//   init X
//   final Z
//   push X -> X Y : 1
//   pop Y X -> Z
//   swap X / a : pi_S -| ^1 -> Y
//   pushswap X / eps : pi_A -> Y     (construction shorthand)
//   popswap Y X / eps : pi_A -> Z    (construction shorthand)
// Names that are not plain tokens are double-quoted.
struct AutomatonDoc {
    Pdt pdt;
    std::optional<std::vector<Prob>> prob;
};

AutomatonDoc parse_automaton(const std::string& text, const std::string& where = "automaton");
std::string write_automaton(const Pdt& pdt, const std::vector<Prob>* prob = nullptr);

// One derivation per line, rule ids separated by whitespace.
Corpus parse_corpus(const Cfg& cfg, const std::string& text, const std::string& where = "corpus");

// Whitespace-separated terminal names; a name outside the alphabet becomes
// -1, which no transition reads.
Word parse_input(const std::vector<std::string>& alphabet, const std::string& text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

} // namespace probstrat
