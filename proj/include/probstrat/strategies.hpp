#pragma once

#include "probstrat/automaton.hpp"
#include "probstrat/grammar.hpp"

#include <string>
#include <vector>

namespace probstrat {

enum class StrategyKind { TopDown, LeftCorner, Plr, EpsLeftCorner, Elr, Lr0 };

std::string kind_name(StrategyKind k);
StrategyKind parse_kind(const std::string& name); // throws FormatError
const std::vector<StrategyKind>& all_kinds();

// Every construction works on the grammar extended with a fresh start rule
// S' -> S that is never output, so the original start rule is emitted like
// any other rule. The returned automaton's rule alphabet is the grammar's
// rule list, in order.
Pdt construct_raw(StrategyKind kind, const Cfg& cfg);
// construct_raw followed by normalize and trim_pdt.
Pdt construct(StrategyKind kind, const Cfg& cfg);

// Output string of a complete computation -> leftmost derivation.
// Throws Error("map_output", "MalformedOutput") when the output does not
// have the shape the strategy produces.
Derivation map_output(StrategyKind kind, const Cfg& cfg, const Output& v);

struct ContractReport {
    bool ok = true;
    int strings_checked = 0;
    int strings_skipped = 0; // the step bound cut the computation search
    int pairs = 0;           // derivation/computation pairs matched
    std::vector<std::string> violations;
};

// Checks, string by string, that f o out is a bijection between complete
// computations (at most max_steps transitions) and leftmost derivations,
// and that rule occurrences are preserved.
ContractReport verify_strategy_contract(StrategyKind kind, const Cfg& cfg, int max_steps);

} // namespace probstrat
