#pragma once

namespace edg {

// Parameter pack derived from the kernel exponent lambda in [0,2).
//
//   alpha    = 1/(2-lambda)          (cluster-size scaling exponent)
//   beta     = 1/(3-2 lambda)        (coarsening exponent; +-inf at lambda=3/2)
//   c_bessel = lambda/(2(2-lambda))  (Bessel index of the continuum kernel)
//   Z        = (2-lambda)^{2/(2-lambda)} Gamma(1 + 1/(2-lambda))
//              (normalization making the tail profile a probability density)
struct ProfileParams {
    double lambda;
    double alpha;
    double beta;
    double c_bessel;
    double Z;

    explicit ProfileParams(double lambda_);
};

enum class CoarseningRegime { Algebraic, Exponential, Blowup };

// Regime trichotomy in lambda: algebraic below 3/2, exponential at 3/2,
// finite-time blow-up above.
CoarseningRegime coarsening_regime(double lambda);

// Exchange rate a_lambda(k): k^lambda for lambda > 0, the indicator of k >= 1
// for lambda = 0; a_lambda(0) = 0 always.
double kernel_a(double lambda, long long k);

// Continuum coefficient a_lambda(x) = x^lambda (with a_0 = 1 on x > 0).
double continuum_a(double lambda, double x);

// Density profile g_lambda(x) = Z^{-1} x^{1-lambda}/(2-lambda)
//                               exp(-x^{2-lambda}/(2-lambda)^2).
// For lambda > 1 the value at x = 0 is +inf (integrable singularity).
double profile_g(const ProfileParams& p, double x);

// Tail profile G_lambda(x) = Z^{-1} exp(-alpha^2 x^{2-lambda}); satisfies
// G' = -g exactly and integrates to one.
double profile_G(const ProfileParams& p, double x);

// Scaling solution gamma_lambda(t,x) = t^{-alpha} G_lambda(t^{-alpha} x).
double scaling_solution_gamma(const ProfileParams& p, double t, double x);

// Spatial continuity gauge theta_lambda(x) = x^{1-lambda}/(1-lambda)
// (log x at lambda = 1).
double theta_modulus(const ProfileParams& p, double x);

// Temporal continuity gauge omega_lambda(r) on r >= 1 with omega(1) = 0.
double omega_modulus(const ProfileParams& p, double r);

} // namespace edg
