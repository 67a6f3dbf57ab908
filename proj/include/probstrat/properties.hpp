#pragma once

#include "probstrat/automaton.hpp"

#include <optional>
#include <unordered_set>
#include <vector>

namespace probstrat {

// Y leads to Y' when a subcomputation turns the one-symbol stack Y into Y'
// without ever going below height one.
class LeadsTo {
public:
    explicit LeadsTo(int symbols) : reach_(symbols) {}

    bool holds(int y, int y2) const { return set_.count(key(y, y2)) > 0; }
    const std::vector<int>& targets(int y) const { return reach_.at(y); }
    size_t pair_count() const { return set_.size(); }
    int symbols() const { return static_cast<int>(reach_.size()); }

    bool insert(int y, int y2) {
        if (!set_.insert(key(y, y2)).second) return false;
        reach_[y].push_back(y2);
        return true;
    }

private:
    static unsigned long long key(int a, int b) {
        return (static_cast<unsigned long long>(static_cast<unsigned>(a)) << 32) | static_cast<unsigned>(b);
    }
    std::vector<std::vector<int>> reach_;
    std::unordered_set<unsigned long long> set_;
};

LeadsTo leadsto_relation(const Pdt& pdt);

struct SppViolation {
    int push = -1;
    int pop1 = -1;
    int pop2 = -1;
};

struct SppReport {
    bool holds = true;
    std::vector<SppViolation> violations;
};
SppReport check_spp(const Pdt& pdt);

// For a push X -> X Y: the pop transitions X Y' -> Z with Y leading to Y'.
std::vector<int> matching_pops(const Pdt& pdt, const LeadsTo& lt, int push);

// Nondeterministic finite automaton over stacks read from the top down.
// The first symbol read selects the start states; each further symbol moves
// every current state along its transitions.
class SurfaceAutomaton {
public:
    SurfaceAutomaton(int states, int symbols) : start_(symbols), edges_(states), accepting_(states, false) {}

    void add_start(int symbol, int state) { start_.at(symbol).push_back(state); }
    void add_edge(int state, int symbol, int next) { edges_.at(state)[symbol].push_back(next); }
    void set_accepting(int state) { accepting_.at(state) = true; }
    void finish(); // sorts and deduplicates successor lists

    const std::vector<int>& start(int symbol) const { return start_.at(symbol); }
    const std::vector<int>& next(int state, int symbol) const;
    const std::map<int, std::vector<int>>& edges(int state) const { return edges_.at(state); }
    bool accepting(int state) const { return accepting_.at(state); }
    int states() const { return static_cast<int>(accepting_.size()); }
    int symbols() const { return static_cast<int>(start_.size()); }

    bool accepts(const std::vector<int>& stack_bottom_first) const;

private:
    std::vector<std::vector<int>> start_;
    std::vector<std::map<int, std::vector<int>>> edges_;
    std::vector<bool> accepting_;
};

// Stacks reachable from the initial configuration (input ignored).
SurfaceAutomaton reachable_stacks(const Pdt& pdt, const LeadsTo& lt);
// Stacks from which the final configuration can still be reached.
SurfaceAutomaton live_stacks(const Pdt& pdt, const LeadsTo& lt);

// A stack accepted by `a` but not by `b`, bottom first, if one exists.
std::optional<std::vector<int>> uncovered_stack(const Pdt& pdt, const SurfaceAutomaton& a,
                                                const SurfaceAutomaton& b);

struct DeadWitness {
    Computation computation;
    Word input;               // the input the computation reads
    std::vector<int> stack;   // the stack it cannot get out of, bottom first
};

struct CppReport {
    bool holds = true;
    std::vector<int> dead_stack; // from the inclusion test, when CPP fails
    std::optional<DeadWitness> witness;
    bool witness_search_exhausted = false;
};

// bound: longest witness considered; 0 means 10 * |Q|.
CppReport check_cpp(const Pdt& pdt, int bound = 0);

struct MassReport {
    Prob sum;
    long complete = 0;
    long dead = 0;
    bool within_bound = true; // sum <= 1
};
MassReport check_mass_bound(const Ppdt& ppdt, int max_steps);

// Transitions used by some complete computation.
std::vector<bool> useful_transitions(const Pdt& pdt, const LeadsTo& lt);

} // namespace probstrat
