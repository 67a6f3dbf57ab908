#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>

using namespace probstrat;
using namespace testing_support;

namespace {

const char* kMixed = R"(inalpha a b
outalpha r
states X Y Z F
init X
final F
push X -> X Y
swap Y / a : r -> Z
pop X Z -> F
swap X / b : eps -> F
)";

int find_transition(const Pdt& p, TransKind kind, int top, int input) {
    for (size_t t = 0; t < p.size(); ++t) {
        const Transition& tr = p.transitions[t];
        if (tr.kind == kind && tr.top == top && tr.input == input) return static_cast<int>(t);
    }
    return -1;
}

std::multiset<Output> outputs(const Pdt& p, const Word& w, int max_steps, bool& truncated) {
    std::multiset<Output> out;
    auto stats = enumerate_computations(p, w, max_steps, true,
                                        [&](const Computation&, const Configuration& c) { out.insert(c.output); });
    truncated = stats.truncated;
    return out;
}

} // namespace

TEST(Normalize, MixedSymbolGetsVariantsAndBridges) {
    Pdt raw = parse_automaton(kMixed).pdt;
    EXPECT_FALSE(is_normal(raw));
    Pdt n = normalize(raw);
    EXPECT_TRUE(is_normal(n));
    EXPECT_EQ(n.size(), raw.size() + 2);
    int bridges = 0;
    for (const Transition& t : n.transitions)
        if (t.kind == TransKind::Swap && t.top == n.init && t.input < 0 && t.output.empty()) ++bridges;
    EXPECT_EQ(bridges, 2);
    for (const char* w : {"a", "b"}) {
        bool t1 = false, t2 = false;
        Word in = parse_input(raw.input_alphabet, w);
        EXPECT_EQ(outputs(raw, in, 10, t1), outputs(n, in, 10, t2)) << w;
        EXPECT_EQ(outputs(n, in, 10, t2).size(), 1u);
    }
}

TEST(Normalize, NormalAutomatonIsUnchanged) {
    Pdt td = construct(StrategyKind::TopDown, g_lr().cfg);
    ASSERT_TRUE(is_normal(td));
    Pdt again = normalize(td);
    ASSERT_EQ(again.size(), td.size());
    for (size_t t = 0; t < td.size(); ++t) EXPECT_EQ(again.transition_text(t), td.transition_text(t));
}

TEST(Normalize, PushSwapShorthand) {
    Pdt p = parse_automaton("inalpha a\noutalpha pi\nstates X Y F\ninit X\nfinal F\n"
                            "pushswap X / a : pi -> Y\npop X Y -> F\n")
                .pdt;
    Pdt n = normalize(p);
    int push = find_transition(n, TransKind::Push, n.init, -1);
    ASSERT_GE(push, 0);
    int mid = n.transitions[push].target;
    EXPECT_EQ(n.symbol_name(mid), "Y{a,pi}");
    int swap = find_transition(n, TransKind::Swap, mid, 0);
    ASSERT_GE(swap, 0);
    EXPECT_EQ(n.symbol_name(n.transitions[swap].target), "Y");
    EXPECT_EQ(n.transitions[swap].output, Output{OutSym::rule(0)});
}

TEST(Enumeration, UnambiguousStringHasOneComputation) {
    Pcfg g = g_lr();
    Pdt td = construct(StrategyKind::TopDown, g.cfg);
    EXPECT_EQ(complete_computations(td, word(g.cfg, "a x c b x d"), 60).size(), 1u);
}

TEST(Enumeration, ZeroStepsGivesOnlyTheEmptyComputation) {
    Pcfg g = g_lr();
    Pdt td = construct(StrategyKind::TopDown, g.cfg);
    std::vector<Computation> seen;
    enumerate_computations(td, word(g.cfg, "a x c b x d"), 0, false,
                           [&](const Computation& c, const Configuration&) { seen.push_back(c); });
    ASSERT_EQ(seen.size(), 1u);
    EXPECT_TRUE(seen[0].steps.empty());
}

TEST(Enumeration, Lr0ComputationUsesTheCShift) {
    Pcfg g = g_lr();
    Pdt lr = construct(StrategyKind::Lr0, g.cfg);
    auto cs = complete_computations(lr, word(g.cfg, "a x c b x d"), 80);
    ASSERT_EQ(cs.size(), 1u);
    int state = lr.symbol_index("{C -> x . c, D -> x . d}");
    ASSERT_GE(state, 0);
    int c = g.cfg.terminal_index("c");
    bool pushes_c_shift = false;
    for (int t : cs[0].steps) {
        const Transition& tr = lr.transitions[t];
        if (tr.kind == TransKind::Push && tr.top == state &&
            find_transition(lr, TransKind::Swap, tr.target, c) >= 0)
            pushes_c_shift = true;
    }
    EXPECT_TRUE(pushes_c_shift);
}

TEST(ComputationProbability, Examples) {
    Pcfg g = g_lr();
    Lifted l = lift(g, StrategyKind::TopDown);
    EXPECT_EQ(computation_probability(l.ppdt, Computation{}), Prob(1));
    auto cs = complete_computations(l.ppdt.pdt, word(g.cfg, "a x c b x d"), 60);
    ASSERT_EQ(cs.size(), 1u);
    EXPECT_EQ(computation_probability(l.ppdt, cs[0]), Prob(Rational(1, 9)));

    auto doc = parse_automaton("inalpha a\noutalpha\nstates X F\ninit X\nfinal F\n"
                               "swap X / a : eps -> F : 0\nswap X / eps : eps -> F : 1\n");
    Ppdt zero{doc.pdt, *doc.prob};
    EXPECT_EQ(computation_probability(zero, Computation{{0}}), Prob(0));
}

TEST(Symbolic, Lr0MonomialHasBothShifts) {
    Pcfg g = g_lr();
    Pdt lr = construct(StrategyKind::Lr0, g.cfg);
    auto ms = symbolic_string_probability(lr, word(g.cfg, "a x c b x d"), 80);
    ASSERT_EQ(ms.size(), 1u);
    int state = lr.symbol_index("{C -> x . c, D -> x . d}");
    int to_c = lr.symbol_index("{C -> x c .}{c,eps}");
    int to_d = lr.symbol_index("{D -> x d .}{d,eps}");
    std::map<int, int> shift_count;
    for (const auto& [t, k] : ms[0]) {
        const Transition& tr = lr.transitions[t];
        if (tr.kind == TransKind::Push && tr.top == state) shift_count[tr.target] += k;
    }
    EXPECT_EQ(shift_count[to_c], 1);
    EXPECT_EQ(shift_count[to_d], 1);
}

TEST(Symbolic, DeterministicPathHasOneMonomial) {
    Pdt p = parse_automaton("inalpha a\noutalpha\nstates X Y F\ninit X\nfinal F\n"
                            "swap X / a : eps -> Y\nswap Y / eps : eps -> F\n")
                .pdt;
    auto ms = symbolic_string_probability(p, parse_input(p.input_alphabet, "a"), 5);
    ASSERT_EQ(ms.size(), 1u);
    EXPECT_EQ(ms[0], (ProbMonomial{{0, 1}, {1, 1}}));
}

TEST(Symbolic, BoundIsReported) {
    Pcfg g = g_lr();
    Pdt td = construct(StrategyKind::TopDown, g.cfg);
    EXPECT_EQ(error_kind([&] { symbolic_string_probability(td, word(g.cfg, "a x c b x d"), 5); }), "BoundExceeded");
}

TEST(Symbolic, Lr0WrStringsDifferInOneFreeChoice) {
    Pcfg g = g_wr();
    Pdt lr = construct(StrategyKind::Lr0, g.cfg);
    auto mb = symbolic_string_probability(lr, word(g.cfg, "a a b"), 80);
    auto mc = symbolic_string_probability(lr, word(g.cfg, "a a c"), 80);
    ASSERT_EQ(mb.size(), 1u);
    ASSERT_EQ(mc.size(), 1u);
    auto groups = transition_groups(lr);
    std::map<int, int> diff;
    for (const auto& [t, k] : mb[0]) diff[t] += k;
    for (const auto& [t, k] : mc[0]) diff[t] -= k;
    std::vector<int> plus, minus;
    for (const auto& [t, k] : diff) {
        if (k == 0 || groups.groups[groups.group_of[t]].size() == 1) continue;
        (k > 0 ? plus : minus).push_back(t);
        EXPECT_EQ(std::abs(k), 1);
    }
    ASSERT_EQ(plus.size(), 1u);
    ASSERT_EQ(minus.size(), 1u);
    EXPECT_EQ(groups.group_of[plus[0]], groups.group_of[minus[0]]);
    int b = g.cfg.terminal_index("b"), c = g.cfg.terminal_index("c");
    EXPECT_GE(find_transition(lr, TransKind::Swap, lr.transitions[plus[0]].target, b), 0);
    EXPECT_GE(find_transition(lr, TransKind::Swap, lr.transitions[minus[0]].target, c), 0);
}

TEST(Reduced, TopDownIsReduced) {
    EXPECT_TRUE(is_reduced_pdt(construct(StrategyKind::TopDown, g_lr().cfg)).reduced);
}

TEST(Reduced, DeadPushIsListedAndTrimmed) {
    Pdt p = parse_automaton("inalpha a\noutalpha\nstates X D F\ninit X\nfinal F\n"
                            "push X -> X D\nswap X / a : eps -> F\n")
                .pdt;
    auto r = is_reduced_pdt(p);
    EXPECT_FALSE(r.reduced);
    EXPECT_EQ(r.unused, std::vector<int>{0});
    Pdt t = trim_pdt(p);
    EXPECT_TRUE(is_reduced_pdt(t).reduced);
    EXPECT_EQ(t.size(), 1u);
    EXPECT_EQ(trim_pdt(t).size(), 1u);
}

TEST(Proper, RangeAndSums) {
    auto doc = parse_automaton("inalpha a\noutalpha\nstates X F\ninit X\nfinal F\n"
                               "swap X / a : eps -> F : 1/2\nswap X / eps : eps -> F : 1/3\n");
    EXPECT_FALSE(check_proper(Ppdt{doc.pdt, *doc.prob}).proper);
    Pcfg g = g_lr();
    EXPECT_TRUE(check_proper(lift(g, StrategyKind::LeftCorner).ppdt).proper);
}

// ---------------------------------------------------------------- properties

TEST(AutomatonProperty, NormalizePreservesInputOutputPairs) {
    GrammarGen gen(21);
    std::mt19937 rng(5);
    for (int trial = 0; trial < 12; ++trial) {
        Pcfg g = gen.next();
        for (StrategyKind k : all_kinds()) {
            Pdt raw;
            try {
                raw = construct_raw(k, g.cfg);
            } catch (const Error& e) {
                ASSERT_EQ(e.kind(), "NullablePrefixInStart");
                continue;
            }
            Pdt n = normalize(raw);
            ASSERT_TRUE(is_normal(n));
            for (int s = 0; s < 3; ++s) {
                Word w = sample_short(g.cfg, rng);
                bool t1 = false, t2 = false;
                auto a = outputs(raw, w, 60, t1);
                auto b = outputs(n, w, 180, t2);
                if (t1 || t2) continue;
                EXPECT_EQ(a, b) << kind_name(k) << " on " << word_text(g.cfg, w);
                EXPECT_FALSE(a.empty());
            }
        }
    }
}

TEST(AutomatonProperty, MonomialsEvaluateToComputationProbabilities) {
    GrammarGen gen(22);
    std::mt19937 rng(6);
    for (int trial = 0; trial < 10; ++trial) {
        Pcfg g = gen.next();
        Lifted l = lift(g, StrategyKind::LeftCorner);
        for (int s = 0; s < 3; ++s) {
            Word w = sample_short(g.cfg, rng);
            auto cs = complete_computations(l.ppdt.pdt, w, 200);
            auto ms = symbolic_string_probability(l.ppdt.pdt, w, 200);
            ASSERT_EQ(cs.size(), ms.size());
            for (size_t i = 0; i < cs.size(); ++i) {
                EXPECT_EQ(monomial_of(cs[i]), ms[i]);
                EXPECT_EQ(evaluate(ms[i], l.ppdt.prob), computation_probability(l.ppdt, cs[i]));
            }
        }
    }
}

TEST(AutomatonProperty, MassOfCompleteComputationsAtMostOne) {
    GrammarGen gen(23);
    for (int trial = 0; trial < 10; ++trial) {
        Pcfg g = gen.next();
        for (StrategyKind k : spp_kinds()) {
            Lifted l;
            try {
                l = lift(g, k);
            } catch (const Error& e) {
                ASSERT_EQ(e.kind(), "NullablePrefixInStart");
                continue;
            }
            for (int bound : {0, 5, 15, 30}) {
                auto m = check_mass_bound(l.ppdt, bound);
                EXPECT_TRUE(m.within_bound);
                if (bound == 0) EXPECT_EQ(m.sum, Prob(0));
            }
        }
    }
}
