#pragma once

#include "probstrat/automaton.hpp"
#include "probstrat/grammar.hpp"
#include "probstrat/strategies.hpp"

#include <optional>
#include <string>
#include <vector>

namespace probstrat {

// Grammar over stack symbols that derives exactly the inputs of the
// automaton's complete computations, one derivation per computation:
//   X -> Y Z    for a push X -> X Y whose matching pops all go to Z
//   X -> x Y    for a swap X -x,y-> Y, weighted by the product of
//               rule_prob over the rules in y (1 without rule_prob)
//   Y -> eps    for Y on top of some pop, and for the final symbol
// Nonterminal i is stack symbol i; the start is the initial symbol.
// Rule ids: "t<n>" for transition n, "e<n>" for symbol n.
// Throws Error(op, "SppRequired") naming a push with two pop targets.
WeightedCfg pdt_to_weighted_cfg(const Pdt& pdt, const std::vector<Prob>* rule_prob = nullptr);

struct Lifted {
    Ppdt ppdt;
    std::vector<Prob> z; // partition function per stack symbol
    bool exact = false;
};

// Transition probabilities that make the automaton assign every complete
// computation the probability of the derivation it stands for:
//   swap X -> Y : p(rules emitted) * Z(Y) / Z(X)
//   push X -> X Y with pop target X' : Z(Y) * Z(X') / Z(X)
//   pop : 1
// Throws CppRequired / SppRequired when the strategy's automaton lacks
// the property, NotProper for an improper grammar.
Lifted lift(const Pcfg& g, StrategyKind kind, double tolerance = 1e-12, int max_iter = 10000);
Lifted lift_pdt(const Pcfg& g, const Pdt& pdt, double tolerance = 1e-12, int max_iter = 10000);

// The automaton read as a PCFG: push and swap rules carry the transition's
// probability, Y -> eps carries 1. Output symbols are ignored. When the
// initial symbol has more than one rule a fresh start rule is added.
Pcfg ppda_to_pcfg(const Ppdt& a);

// A pair of probe strings compared through their one computation each.
struct ProbeRatio {
    Word first, second;
    Rational grammar_ratio;        // p_G(first) / p_G(second)
    ProbMonomial numerator;        // transitions left over after cancelling
    ProbMonomial denominator;      // shared ones, forced ones removed
    bool forced() const { return numerator.empty() && denominator.empty(); }
};

struct FeasibilityVerdict {
    bool infeasible = false;
    std::vector<ProbeRatio> ratios;
    std::vector<int> forced_transitions; // sole option for their top symbol(s)
    std::vector<std::string> conflicts;  // human-readable reasons
    std::string explanation;
};

// Probes are taken two at a time: (0,1), (2,3), ... A ratio whose residual
// is empty is forced to 1; two pairs with the same residual must have the
// same grammar ratio. Either failing refutes every probability assignment.
// Never claims feasibility. Throws AmbiguousProbe, NoComputation,
// BoundExceeded.
FeasibilityVerdict feasibility_analysis(const Pcfg& g, StrategyKind kind, const std::vector<Word>& probes,
                                        int max_steps = 400);

// Brute force over the transition groups that occur in the probes' monomials:
// every group's probabilities range over a grid with the given step (members
// absent from the monomials absorb the remaining mass). Returns the first
// assignment giving every probe its target within tol.
struct GridResult {
    long assignments = 0;
    std::optional<std::vector<Prob>> match; // full probability vector
    int free_groups = 0;
};
GridResult grid_search(const Pdt& pdt, const std::vector<ProbMonomial>& probes, const std::vector<double>& targets,
                       double step = 0.01, double tol = 1e-6, long limit = 50'000'000);

} // namespace probstrat
