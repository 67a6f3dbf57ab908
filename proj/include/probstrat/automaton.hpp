#pragma once

#include "probstrat/errors.hpp"
#include "probstrat/grammar.hpp"
#include "probstrat/value.hpp"

#include <functional>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

namespace probstrat {

// Output symbols: grammar rules (by index into the transducer's rule
// alphabet), the end-of-spine marker, and small integer markers.
enum class OutKind { Rule, End, Marker };

struct OutSym {
    OutKind kind = OutKind::Rule;
    int value = 0;

    static OutSym rule(int r) { return {OutKind::Rule, r}; }
    static OutSym end() { return {OutKind::End, 0}; }
    static OutSym marker(int m) { return {OutKind::Marker, m}; }
    friend bool operator==(const OutSym&, const OutSym&) = default;
    friend auto operator<=>(const OutSym&, const OutSym&) = default;
};

using Output = std::vector<OutSym>;

// Push, Pop and Swap are the three normal-form kinds. PushSwap
// (X -x,y-> X Y) and PopSwap (Y X -x,y-> Z) are construction shorthands
// that normalize() expands.
enum class TransKind { Push, Pop, Swap, PushSwap, PopSwap };

struct Transition {
    TransKind kind = TransKind::Swap;
    int top = -1;    // symbol on top of the stack
    int below = -1;  // pops only: the symbol under the top
    int target = -1; // pushed symbol (push kinds) or replacement (pop, swap)
    int input = -1;  // terminal index, -1 for epsilon
    Output output;
    std::string label; // optional human-readable tag, kept through normalize
};

class Pdt {
public:
    Pdt() = default;
    Pdt(std::vector<std::string> input_alphabet, std::vector<std::string> rule_alphabet)
        : input_alphabet(std::move(input_alphabet)), rule_alphabet(std::move(rule_alphabet)) {}

    std::vector<std::string> input_alphabet;
    std::vector<std::string> rule_alphabet; // the R part of the output alphabet
    int init = -1;
    int final = -1;
    std::vector<Transition> transitions;

    const std::vector<std::string>& symbols() const { return symbols_; }
    int symbol_index(const std::string& name) const; // -1 if absent
    int intern(const std::string& name);             // adds when absent
    const std::string& symbol_name(int s) const { return symbols_.at(s); }
    int symbol_count() const { return static_cast<int>(symbols_.size()); }

    int add(Transition t);
    int push(int x, int y, std::string label = {});
    int pop(int below, int top, int z, std::string label = {});
    int swap(int x, int input, Output out, int y, std::string label = {});
    int push_swap(int x, int input, Output out, int y, std::string label = {});
    int pop_swap(int below, int top, int input, Output out, int z, std::string label = {});

    // Number of transitions; the unit for all size claims about automata.
    size_t size() const { return transitions.size(); }

    std::string output_text(const Output& out) const;
    std::string transition_text(int t) const;

private:
    std::vector<std::string> symbols_;
    std::unordered_map<std::string, int> index_;
};

struct Ppdt {
    Pdt pdt;
    std::vector<Prob> prob; // indexed by transition id
};

bool is_normal(const Pdt& pdt);
Pdt normalize(const Pdt& raw);

// Per-symbol groups whose probabilities must sum to one: pushes by top,
// swaps by top, pops by (below, top).
struct TransitionGroups {
    std::vector<std::vector<int>> groups;
    std::vector<int> group_of; // per transition
};
TransitionGroups transition_groups(const Pdt& pdt);

struct ProperReport {
    bool proper = true;
    std::vector<std::string> violations;
};
ProperReport check_proper(const Ppdt& ppdt, double tolerance = 0.0);

struct Configuration {
    std::vector<int> stack; // bottom first
    size_t position = 0;    // input symbols consumed
    Output output;
};

struct Computation {
    std::vector<int> steps; // transition ids
};

// Configurations visited by a computation, starting with the initial one.
// Throws Error("replay", "NotApplicable") if some step does not apply.
std::vector<Configuration> replay(const Pdt& pdt, const Word& input, const Computation& c);
bool applicable(const Pdt& pdt, const Transition& t, const Configuration& cfg, const Word& input);

struct EnumerationStats {
    long emitted = 0;
    bool truncated = false; // some branch was cut by the step bound
};

// Depth-first, ascending transition id at every choice point.
EnumerationStats enumerate_computations(
    const Pdt& pdt, const Word& input, int max_steps, bool complete_only,
    const std::function<void(const Computation&, const Configuration&)>& emit);
std::vector<Computation> complete_computations(const Pdt& pdt, const Word& input, int max_steps);

Prob computation_probability(const Ppdt& ppdt, const Computation& c);

// Multiset of transition ids.
using ProbMonomial = std::map<int, int>;
ProbMonomial monomial_of(const Computation& c);
Prob evaluate(const ProbMonomial& m, const std::vector<Prob>& prob);
std::string monomial_text(const Pdt& pdt, const ProbMonomial& m);

// One monomial per complete computation on w. Throws
// Error("symbolic_string_probability", "BoundExceeded") when the step bound
// cut the search.
std::vector<ProbMonomial> symbolic_string_probability(const Pdt& pdt, const Word& w, int max_steps);

// Erases End and Marker symbols, leaving the rule sequence.
Derivation overline(const Output& v);

struct ReducedReport {
    bool reduced = false;
    std::vector<int> unused; // transition ids in no complete computation
};
ReducedReport is_reduced_pdt(const Pdt& pdt);
Pdt trim_pdt(const Pdt& pdt);

} // namespace probstrat
