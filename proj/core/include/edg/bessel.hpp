#pragma once

#include <vector>

namespace edg {

// Evaluation record for the modified Bessel function of the first kind.
// `scaled` holds e^{-z} I_nu(z), which stays representable where the plain
// value overflows; `value` is +inf in that case.
struct BesselEval {
    double nu = 0.0;
    double z = 0.0;
    double value = 0.0;
    double scaled = 0.0;
};

// I_nu(z) for nu >= -1/2, z >= 0.
// Power series for z <= max(12, 2 nu); beyond that a compound large-argument
// expansion for small orders, and stable downward recurrence normalized at a
// fractional base order otherwise.
BesselEval bessel_i(double nu, double z);

// e^{-z} I_nu(z) directly.
double bessel_i_scaled(double nu, double z);

// Switch point between the series and asymptotic regimes, exposed so the
// seam can be audited.
double bessel_series_cutoff(double nu);

// h_c(z) = z^{-(c-1/2)} I_{c-1/2}(z), entire in z^2, continued to z = 0 by
// its series value h_c(0) = 1 / (2^{c-1/2} Gamma(c+1/2)).
double h_function(double c, double z);

// log of h_c(z) minus z, i.e. log(e^{-z} h_c(z)); usable for arbitrarily
// large z where h_c itself overflows.
double log_h_scaled(double c, double z);

// Scaled integer-order row e^{-z} I_k(z) for k = 0..kmax at z = 2t, i.e. the
// whole-lattice discrete heat kernel phi(t,k) = e^{-2t} I_k(2t). One downward
// recurrence pass, normalized by sum_k I_k(z) = e^z.
std::vector<double> heat_phi_row(double t, int kmax);

// phi(t,x) = e^{-2t} I_x(2t) for real x >= 0.
double heat_phi(double t, double x);

// Fundamental solution of the discrete heat equation on N with absorbing
// boundary, psi(t,k,l) = phi(t,k-l) - phi(t,k+l), for integer k >= 0, l >= 1.
double heat_psi(double t, int k, int l);

// Same quantity as a function of a real position x >= l-1, evaluated through
// the mean-value expansion psi(t,x,l) = (1/t) sum_{m=1}^{l} (x-l+2m-1)
// phi(t, x-l+2m-1).
double heat_psi_real(double t, double x, int l);

} // namespace edg
