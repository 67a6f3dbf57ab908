#pragma once

#include "probstrat/errors.hpp"
#include "probstrat/value.hpp"

#include <functional>
#include <string>
#include <vector>

namespace probstrat {

enum class SymKind { Terminal, Nonterminal };

struct Symbol {
    std::string name;
    SymKind kind = SymKind::Terminal;
};

// Reference to a grammar symbol by position in the grammar's symbol tables.
struct Sym {
    SymKind kind = SymKind::Terminal;
    int index = 0;

    bool terminal() const { return kind == SymKind::Terminal; }
    friend bool operator==(const Sym&, const Sym&) = default;
    friend auto operator<=>(const Sym&, const Sym&) = default;
};

struct Rule {
    std::string id;
    int lhs = 0;
    std::vector<Sym> rhs;
};

struct Cfg {
    std::vector<std::string> terminals;
    std::vector<std::string> nonterminals;
    int start = 0;
    std::vector<Rule> rules;

    int terminal_index(const std::string& name) const;    // -1 if absent
    int nonterminal_index(const std::string& name) const; // -1 if absent
    int rule_index(const std::string& id) const;          // -1 if absent
    std::vector<int> rules_of(int nonterminal) const;
    std::string symbol_name(Sym s) const;
    std::string rule_text(int r) const; // "A -> a B" (rhs "eps" when empty)
    Symbol symbol(Sym s) const { return {symbol_name(s), s.kind}; }

    // Sum over rules of |A alpha|.
    size_t size() const;
    // Number of nonterminal occurrences in a rule's right-hand side.
    int nonterminal_arity(int r) const;
};

struct Pcfg {
    Cfg cfg;
    std::vector<Prob> prob; // indexed by rule
};

// Non-negative rule weights without a properness requirement.
struct WeightedCfg {
    Cfg cfg;
    std::vector<Prob> weight;
};

using Derivation = std::vector<int>; // rule indices, leftmost order
using Corpus = std::vector<Derivation>;
using Word = std::vector<int>;       // terminal indices

// Symbol table sanity plus, when asked, the single non-empty start rule.
void check_well_formed(const Cfg& cfg, bool require_unique_start, const std::string& op);

Cfg reduce(const Cfg& cfg);
bool is_reduced(const Cfg& cfg);
std::vector<bool> nullable_nonterminals(const Cfg& cfg);

// Reflexive-transitive closure of the left-corner relation over all grammar
// symbols. With ignore_nullable_prefix, X relates to A whenever A -> mu X beta
// with mu deriving the empty string.
class SymbolRelation {
public:
    SymbolRelation() = default;
    SymbolRelation(int terminals, int nonterminals);
    bool holds(Sym x, Sym y) const { return m_[flat(x)][flat(y)]; }
    void set(Sym x, Sym y) { m_[flat(x)][flat(y)] = true; }
    void close(); // reflexive-transitive closure
    int terminals() const { return t_; }
    int nonterminals() const { return n_; }

private:
    int flat(Sym s) const { return s.terminal() ? s.index : t_ + s.index; }
    int t_ = 0, n_ = 0;
    std::vector<std::vector<bool>> m_;
};

SymbolRelation left_corner_relation(const Cfg& cfg, bool ignore_nullable_prefix);

Pcfg mle_estimate(const Cfg& cfg, const Corpus& corpus);

struct PartitionResult {
    std::vector<Prob> z; // per nonterminal
    bool exact = false;  // no cyclic component needed iteration
    int iterations = 0;  // largest iteration count over cyclic components
};

class NonConvergence : public Error {
public:
    NonConvergence(const std::string& op, std::vector<double> last, double change)
        : Error(op, "NonConvergence", "last sup-norm change " + std::to_string(change)),
          last_iterate(std::move(last)) {}
    std::vector<double> last_iterate;
};

// Least non-negative solution of Z(A) = sum_{A->X1..Xk} w * prod Z(Xi).
// Acyclic dependency components are solved exactly; cyclic ones by
// monotone iteration from zero.
PartitionResult partition_functions(const WeightedCfg& g, double tolerance = 1e-12, int max_iter = 10000,
                                    bool parallel = false);
PartitionResult partition_functions(const Pcfg& g, double tolerance = 1e-12, int max_iter = 10000);

bool is_proper(const Pcfg& g, double tolerance = 0.0);

struct ConsistencyVerdict {
    bool consistent = false;
    Prob z_start;
};
ConsistencyVerdict is_consistent(const Pcfg& g, double tolerance = 1e-12, int max_iter = 10000);

// Replays a derivation leftmost from the start symbol. Returns the yield, or
// throws Error(op, "MalformedDerivation") if some step does not apply or the
// derivation is incomplete.
Word derivation_yield(const Cfg& cfg, const Derivation& d, const std::string& op = "derivation_yield");
bool is_complete_derivation(const Cfg& cfg, const Derivation& d);
Prob derivation_probability(const Pcfg& g, const Derivation& d);

// Every complete derivation with at most max_steps rules, in lexicographic
// order of rule indices. With a target word, only derivations of that word
// are produced (and the search is pruned accordingly).
void enumerate_derivations(const Cfg& cfg, int max_steps,
                           const std::function<void(const Derivation&, const Word&)>& emit,
                           const Word* target = nullptr);
std::vector<std::pair<Derivation, Word>> enumerate_derivations(const Cfg& cfg, int max_steps);

Prob string_probability_cfg(const Pcfg& g, const Word& w, int max_steps);

// Token helpers; unknown tokens map to -1.
Word to_word(const Cfg& cfg, const std::vector<std::string>& tokens);
std::string word_text(const Cfg& cfg, const Word& w);
std::string derivation_text(const Cfg& cfg, const Derivation& d);

} // namespace probstrat
