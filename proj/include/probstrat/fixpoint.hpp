#pragma once

#include <vector>

namespace probstrat {

// A system of polynomial equations x_i = sum_k coef_k * prod_{v in vars_k} x_v
// with non-negative coefficients. Both partition functions and the cyclic
// parts of the item-probability equations reduce to this shape.
struct Term {
    double coef = 0.0;
    std::vector<int> vars;
};

struct PolySystem {
    std::vector<std::vector<Term>> equations;
    int size() const { return static_cast<int>(equations.size()); }
};

// One Jacobi sweep: out[i] = rhs_i(in). Returns the sup-norm of out - in.
// The serial version is the reference; the OpenMP one must agree bit for bit
// since each equation is evaluated independently in the same order.
double jacobi_sweep_serial(const PolySystem& sys, const std::vector<double>& in, std::vector<double>& out);
double jacobi_sweep_parallel(const PolySystem& sys, const std::vector<double>& in, std::vector<double>& out);

struct FixpointResult {
    std::vector<double> values;
    int iterations = 0;
    bool converged = false;
    double last_change = 0.0;
};

// Monotone iteration from zero towards the least non-negative solution.
// Stops once a sweep changes no value by `tolerance` or more.
FixpointResult least_fixpoint(const PolySystem& sys, double tolerance, int max_iter, bool parallel = false);

} // namespace probstrat
