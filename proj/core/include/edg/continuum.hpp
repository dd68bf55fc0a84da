#pragma once

#include "edg/discrete.hpp"
#include "edg/profiles.hpp"

#include <vector>

namespace edg {

// Bessel change of variables z(x) = (2/(2-lambda)) x^{1-lambda/2} and its
// inverse.
double change_of_variables_z(double lambda, double x);
double change_of_variables_x(double lambda, double z);

// Fundamental solution of the continuum problem,
//   Psi(t,x,y) = (2/(2-lambda))^{lambda alpha} (2t)^{-alpha}
//                exp(-(z(x)^2+z(y)^2)/(4t)) h_c(z(x) z(y)/(2t)),
// evaluated through the exponentially scaled Bessel form; the Gaussian
// prefactor combines with the scaling exponent to exp(-(z(x)-z(y))^2/(4t)).
double psi_kernel(const ProfileParams& p, double t, double x, double y);

// Domain cut X with int_X^inf gamma_lambda(t,.) <= tail_mass.
double domain_cut(const ProfileParams& p, double t, double tail_mass = 1e-12);

struct SemigroupResult {
    PLFunction f;
    bool domain_ok = true; // false when boundary values exceed 1e-10 of peak
};

// S_lambda(t) g by quadrature of Psi against the cubic interpolant of the
// sampled g; t = 0 is the identity.
SemigroupResult semigroup_apply(const ProfileParams& p, double t, const PLFunction& g);

struct EntropyFisher {
    double entropy = 0.0;      // int (dmu/rho gamma) log(...) rho gamma dx
    double fisher = 0.0;       // int a_lambda |d/dx log(dmu/rho gamma)|^2 dmu
    int floored_cells = 0;     // zero-density cells clamped at 1e-300
};

// Relative entropy and Fisher information of the density mu with respect to
// rho gamma_lambda(t,.) on mu's grid.
EntropyFisher relative_entropy_fisher(const PLFunction& mu, const ProfileParams& p,
                                      double t, double rho);

struct BobkovGotzeBounds {
    double b_minus = 0.0;
    double b_plus = 0.0;
    double c_lsi_bound = 0.0; // 4 max(B-, B+)
    bool diverged = false;    // supremum still rising at the grid edge
};

// Bobkov-Goetze quantities for the measure with density exp(-alpha^2
// x^{2-lambda}) and carre-du-champ weight x^lambda, by quadrature over
// log-spaced grids on both sides of the median scale x = 1.
BobkovGotzeBounds bobkov_gotze_constants(const ProfileParams& p, int grid_points = 400);

// lambda = 0 oracle: density u(t,k) = sum_l psi(t,k,l) u0(l) from the
// explicit whole-lattice kernel reflected across the absorbing boundary.
std::vector<double> lambda0_oracle_density(double t, int kmax,
                                           const std::vector<double>& u0);

} // namespace edg
