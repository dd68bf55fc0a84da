#pragma once

#include <functional>

namespace edg {

struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0;
    bool converged = true;
};

// Adaptive Gauss-Kronrod (G7/K15) on a finite interval. Bisection-based
// refinement; handles integrable endpoint singularities since all nodes
// are interior.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol = 1e-12, double rel_tol = 1e-12,
                     int max_depth = 60);

// Integral over [a, inf) via the rational substitution x = a + u/(1-u).
QuadResult integrate_to_inf(const std::function<double(double)>& f, double a,
                            double abs_tol = 1e-12, double rel_tol = 1e-12);

} // namespace edg
