#pragma once

#include "probstrat/automaton.hpp"

#include <map>
#include <string>
#include <tuple>
#include <vector>

namespace probstrat {

constexpr int kBottom = -1; // the imaginary symbol below the bottom of the stack

// forward(X,Y,i,j): from the start, Y ends up directly above X, where X
// became the top after reading i symbols and Y after reading j.
// inner(X,Y,i,j): the same for a subcomputation opened by a push X -> X Y'.
struct TableItem {
    bool inner = false;
    int lower = kBottom;
    int upper = 0;
    int i = 0, j = 0;
    friend auto operator<=>(const TableItem&, const TableItem&) = default;
};

// One way to infer an item: the transition applied (-1 for the initial
// item) and up to two antecedent items.
struct ItemStep {
    int transition = -1;
    int first = -1;
    int second = -1;
};

class ItemTable {
public:
    Word input;
    std::vector<TableItem> items;
    std::vector<std::vector<ItemStep>> steps; // per item
    std::vector<Prob> value;                  // filled by solve_item_probabilities
    bool solved = false;
    bool exact = false;

    int find(const TableItem& it) const; // -1 if absent
    int add(const TableItem& it, bool& fresh);
    std::string item_text(const Pdt& pdt, int id) const;

private:
    std::map<TableItem, int> index_;
};

struct ScanUniformity {
    bool uniform = true;
    std::vector<int> mixed; // symbols with both input-reading and empty swaps
};
ScanUniformity check_scan_uniformity(const Pdt& pdt);

// Closure of the seven inference rules over the given input.
ItemTable derive_items(const Pdt& pdt, const Word& input);

// Sum over all inferences of each item of the product of transition
// probabilities. Acyclic parts exactly, cyclic parts by monotone iteration.
// Throws NonConvergence from the fixed-point solver.
void solve_item_probabilities(ItemTable& table, const Ppdt& a, double tolerance = 1e-12, int max_iter = 10000);

Prob string_probability_ppdt(const Ppdt& a, const Word& w, double tolerance = 1e-12, int max_iter = 10000);

struct PrefixOptions {
    bool assume_consistent = false; // skip the consistency check
    double tolerance = 1e-12;
    int max_iter = 10000;
};

struct PrefixResult {
    Prob value;
    std::vector<std::string> warnings; // e.g. NotVerifiedConsistent
};

// Mass of all strings that begin with w. Requires scan uniformity
// (ScanUniformityViolation otherwise). Unless assume_consistent, the
// automaton is turned into a PCFG and checked for consistency; an
// inconsistent automaton throws NotConsistent, and one that cannot be
// checked yields a NotVerifiedConsistent warning.
PrefixResult prefix_probability(const Ppdt& a, const Word& w, const PrefixOptions& opt = {});

} // namespace probstrat
