#include "probstrat/fixpoint.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace probstrat;

namespace {

// Random sub-stochastic polynomial system: coefficients of each equation
// sum to at most 0.95, so the least solution is finite.
PolySystem random_system(std::mt19937& rng, int n) {
    PolySystem sys;
    sys.equations.resize(n);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> var(0, n - 1), arity(0, 2), terms(1, 4);
    for (auto& eq : sys.equations) {
        int k = terms(rng);
        std::vector<double> w(k);
        double total = 0;
        for (double& x : w) total += (x = u(rng));
        for (int t = 0; t < k; ++t) {
            Term term{0.95 * w[t] / total, {}};
            for (int a = arity(rng); a > 0; --a) term.vars.push_back(var(rng));
            eq.push_back(term);
        }
    }
    return sys;
}

} // namespace

TEST(Jacobi, ParallelSweepMatchesSerialBitForBit) {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        PolySystem sys = random_system(rng, 50 + trial * 20);
        std::vector<double> in(sys.size());
        for (double& x : in) x = std::uniform_real_distribution<double>(0, 1)(rng);
        std::vector<double> a(sys.size()), b(sys.size());
        double ca = jacobi_sweep_serial(sys, in, a);
        double cb = jacobi_sweep_parallel(sys, in, b);
        EXPECT_EQ(a, b);
        EXPECT_EQ(ca, cb);
    }
}

TEST(Jacobi, FixpointSameBothWays) {
    std::mt19937 rng(4);
    for (int trial = 0; trial < 10; ++trial) {
        PolySystem sys = random_system(rng, 40);
        auto s = least_fixpoint(sys, 1e-13, 100000, false);
        auto p = least_fixpoint(sys, 1e-13, 100000, true);
        ASSERT_TRUE(s.converged);
        EXPECT_EQ(s.values, p.values);
        EXPECT_EQ(s.iterations, p.iterations);
        // a fixed point up to the tolerance
        std::vector<double> next(sys.size());
        EXPECT_LT(jacobi_sweep_serial(sys, s.values, next), 1e-12);
    }
}

TEST(Jacobi, LeastRootOfQuadratic) {
    // x = 0.6 x^2 + 0.4 has roots 2/3 and 1; iteration from zero finds 2/3
    PolySystem sys;
    sys.equations = {{Term{0.6, {0, 0}}, Term{0.4, {}}}};
    auto r = least_fixpoint(sys, 1e-14, 100000);
    ASSERT_TRUE(r.converged);
    EXPECT_NEAR(r.values[0], 2.0 / 3, 1e-12);
}

TEST(Jacobi, ReportsNonConvergence) {
    PolySystem sys;
    sys.equations = {{Term{0.5, {0, 0}}, Term{0.5, {}}}}; // critical: converges like 1/n
    auto r = least_fixpoint(sys, 1e-14, 50);
    EXPECT_FALSE(r.converged);
    EXPECT_EQ(r.iterations, 50);
    EXPECT_GT(r.last_change, 1e-14);
}
