#pragma once

#include "edg/cluster.hpp"
#include "edg/discrete.hpp"
#include "edg/heat.hpp"
#include "edg/profiles.hpp"

#include <functional>
#include <vector>

namespace edg {

// Step-function embedding of a lattice field,
//   (iota_eps U)(x) = eps^{-alpha} U(floor(eps^{-alpha} x) + 1),
// supported on [0, K eps^alpha).
struct RescaledField {
    double epsilon = 1.0;
    double alpha = 0.5;
    std::vector<double> u; // U(k), k = 1..K

    double cell() const;    // eps^alpha
    double x_limit() const; // K * cell
    double eval(double x) const;
    double mass() const; // integral = sum_k U(k)
};

RescaledField iota_embed(const std::vector<double>& U, double epsilon, double alpha);

// Projection onto lattice cells [(k-1) eps^alpha, k eps^alpha), exact for
// step functions and by per-cell quadrature of a piecewise-linear density.
std::vector<double> pi_project(const RescaledField& mu, double epsilon, int kmax);
std::vector<double> pi_project(const PLFunction& density, double epsilon, double alpha,
                               int kmax);

// Exact integral of the piecewise-linear density over [a,b].
double pl_integral_over(const PLFunction& f, double a, double b);

// Rescaled long-time view U_hat(t,x) = t^alpha U(t, floor(t^alpha x)+1),
// expressed as iota with eps = 1/t.
RescaledField rescaled_solution(const LatticeField& U, double t, double alpha);

struct SelfSimilarityError {
    double sup_error = 0.0;
    bool window_ok = true; // false when the window leaves the truncated range
};

// sup_{x in [delta, X]} | U_hat(t,x) - rho G_lambda(x) |, exact per lattice
// cell since G is monotone.
SelfSimilarityError self_similarity_error(const LatticeField& U, double t,
                                          double delta, double X,
                                          const ProfileParams& p, double rho);

struct SmoothTestFunction {
    std::function<double(double)> f, df, d2f, d3f;
};

struct DefectReport {
    std::vector<double> defect;     // R_eps(phi,k), k = 1..K
    double max_normalized = 0.0;    // over k >= 3, against the integral envelope
    double global_constant = 0.0;   // ||eps^{-1} L pi phi||_inf / (||L phi||_inf eps^alpha)
    bool hypotheses_ok = true;      // a_lambda phi' Lipschitz and vanishing at 0
};

DefectReport replacement_defect(const SmoothTestFunction& phi, const ProfileParams& p,
                                double epsilon, double x_support);

struct FitReport {
    double exponent = 0.0;
    double stderr_slope = 0.0;
    double t_lo = 0.0;
    double t_hi = 0.0;
    double r2 = 0.0;
    double amplitude = 0.0; // exp(intercept)
    CoarseningRegime regime = CoarseningRegime::Algebraic;
};

// Least-squares slope of log y against log t on [t_lo, t_hi].
FitReport fit_loglog(const std::vector<double>& t, const std::vector<double>& y,
                     double t_lo, double t_hi);
// Slope of log y against t on [t_lo, t_hi].
FitReport fit_semilog(const std::vector<double>& t, const std::vector<double>& y,
                      double t_lo, double t_hi);

// Regime-dispatching exponent fit: algebraic over the final time decade,
// exponential over the second half, blow-up against log(t*-t).
FitReport fit_coarsening_exponent(const std::vector<double>& t,
                                  const std::vector<double>& ell,
                                  CoarseningRegime regime, double t_star = 0.0);

// Fit of the time change against its predicted asymptotic law.
FitReport tau_asymptotics(const TimeChangeMap& map, const ProfileParams& p);

struct MomentAsymptotics {
    double estimate = 0.0; // rescaled moment at the final time
    double target = 0.0;   // rho int x^nu g_lambda dx (NaN for nu > 1)
    bool converged = true; // final two decades differ by < 5%
};

MomentAsymptotics moment_asymptotics(const HeatTrajectory& dp_traj, double nu,
                                     const ProfileParams& p, double rho);

} // namespace edg
