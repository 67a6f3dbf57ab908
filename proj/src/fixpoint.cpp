#include "probstrat/fixpoint.hpp"

#include <cmath>

namespace probstrat {

namespace {

inline double eval_equation(const std::vector<Term>& eq, const std::vector<double>& x) {
    double s = 0.0;
    for (const Term& t : eq) {
        double p = t.coef;
        for (int v : t.vars) p *= x[v];
        s += p;
    }
    return s;
}

} // namespace

double jacobi_sweep_serial(const PolySystem& sys, const std::vector<double>& in, std::vector<double>& out) {
    const int n = sys.size();
    out.resize(n);
    double change = 0.0;
    for (int i = 0; i < n; ++i) {
        out[i] = eval_equation(sys.equations[i], in);
        change = std::fmax(change, std::fabs(out[i] - in[i]));
    }
    return change;
}

double jacobi_sweep_parallel(const PolySystem& sys, const std::vector<double>& in, std::vector<double>& out) {
    const int n = sys.size();
    out.resize(n);
    double change = 0.0;
#pragma omp parallel for reduction(max : change) schedule(static)
    for (int i = 0; i < n; ++i) {
        out[i] = eval_equation(sys.equations[i], in);
        change = std::fmax(change, std::fabs(out[i] - in[i]));
    }
    return change;
}

FixpointResult least_fixpoint(const PolySystem& sys, double tolerance, int max_iter, bool parallel) {
    FixpointResult res;
    std::vector<double> cur(sys.size(), 0.0), next;
    for (int it = 1; it <= max_iter; ++it) {
        double change = parallel ? jacobi_sweep_parallel(sys, cur, next) : jacobi_sweep_serial(sys, cur, next);
        cur.swap(next);
        res.iterations = it;
        res.last_change = change;
        if (change < tolerance) { res.converged = true; break; }
    }
    res.values = std::move(cur);
    return res;
}

} // namespace probstrat
