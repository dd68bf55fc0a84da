#pragma once

#include <vector>

namespace edg {

// A real field on the lattice {1,...,N}. v[0] holds the value at k=1.
// The boundary value at k=0 is supplied per context: zero for density
// fields, the value at k=1 (Neumann) for tail fields.
struct LatticeField {
    std::vector<double> v;
    double lambda = 0.0;

    LatticeField() = default;
    LatticeField(std::vector<double> values, double lambda_);

    int n() const { return static_cast<int>(v.size()); }
    double at_k(int k) const { return v[static_cast<size_t>(k) - 1]; }
    double& at_k(int k) { return v[static_cast<size_t>(k) - 1]; }
};

enum class LeftBoundary { Zero, Neumann };

struct MomentVector {
    std::vector<double> orders;
    std::vector<double> values;
};

// Forward/backward differences. diff_plus uses f(N+1)=0; diff_minus at k=1
// uses the requested boundary value at k=0.
double diff_minus(const LatticeField& f, int k, LeftBoundary bc = LeftBoundary::Zero);
double diff_plus(const LatticeField& f, int k);

// Weighted lattice Laplacian L U = del^-(a_lambda del^+ U) with zero flux
// through both ends (Neumann at k=0, reflecting truncation at k=N). The
// result sums to zero up to roundoff.
LatticeField apply_L_lambda(const LatticeField& U);

// Dirichlet form E(U,V) = sum_{k=1}^{N-1} k^lambda del^+U(k) del^+V(k).
double dirichlet_form(const LatticeField& U, const LatticeField& V);
double dirichlet_energy(const LatticeField& U);

// Truncated moments M_kappa = sum_k k^kappa f(k), compensated summation.
MomentVector moments(const LatticeField& f, const std::vector<double>& orders);
double moment(const LatticeField& f, double order);

// Tail pair: U(k) = sum_{l>=k} u(l) and its inverse u = -del^+ U.
LatticeField tail_transform(const LatticeField& u);
LatticeField tail_inverse(const LatticeField& U);

// ||U||_2^2 / ( ||U||_1^{2(2-lambda)/(3-lambda)} E(U)^{1/(3-lambda)} );
// +inf when the energy vanishes (constant fields).
double nash_functional(const LatticeField& U);

// Piecewise-linear function on the uniform grid over [0, x_max].
struct PLFunction {
    double x_max = 1.0;
    std::vector<double> v; // node values, size >= 2

    double dx() const { return x_max / static_cast<double>(v.size() - 1); }
    double node(int i) const { return dx() * i; }
};

double pl_l1(const PLFunction& f);    // exact integral of |f|
double pl_l2sq(const PLFunction& f);  // exact integral of f^2
// Weighted Dirichlet form int x^lambda f' g' dx, exact per cell.
double pl_dirichlet(const PLFunction& f, const PLFunction& g, double lambda);
double pl_dirichlet_energy(const PLFunction& f, double lambda);

// Nonincreasing rearrangement at grid resolution (node values sorted
// descending); L^1/L^2 norms are preserved up to O(dx). Rejects negative
// input.
PLFunction decreasing_rearrangement(const PLFunction& f);

// int |f-mean|^2 / ( R^{2-lambda} int |f'|^2 x^lambda ) after centering f to
// zero mean. Returns 0 for constant input. The sharpness of the candidate
// bound 1/(2(2-lambda)(4-lambda)) is not asserted here; callers compare.
double poincare_ratio(const PLFunction& f, double lambda);

// Piecewise-linear embedding of a discrete field: constant U(1) on [0,1],
// then linear interpolation of U(k) on [k,k+1] with U(N+1)=0.
PLFunction embed_discrete(const LatticeField& U);

} // namespace edg
