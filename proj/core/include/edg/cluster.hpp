#pragma once

#include "edg/heat.hpp"

#include <optional>
#include <string>
#include <vector>

namespace edg {

// Cluster concentrations c_0..c_N with volume sum_{k>=0} c_k = 1 and mass
// sum_{k>=1} k c_k = rho.
struct ClusterState {
    std::vector<double> c; // index k = 0..N
    double lambda = 0.0;
    double rho = 0.0;

    ClusterState() = default;
    ClusterState(std::vector<double> c_, double lambda_, double rho_);

    int n() const { return static_cast<int>(c.size()) - 1; }
    double volume() const;          // sum_k c_k
    double mass() const;            // sum_k k c_k
    double m0_living() const;       // sum_{k>=1} c_k
    double m_lambda() const;        // sum_{k>=1} k^lambda c_k
    void validate(double tol = 1e-9) const;
};

ClusterState monodisperse_state(double lambda, double rho, int n);
ClusterState geometric_state(double lambda, double rho, double q, int n);

// Right-hand side of the exchange dynamics with the exchange across the
// (N,N+1) edge suppressed; both sum_k rhs_k and sum_k k rhs_k vanish exactly
// up to roundoff.
std::vector<double> edg_rhs(const ClusterState& s);

enum class HaltReason { ReachedEnd, Blowup, StepUnderflow };

struct EdgTrajectory {
    std::vector<double> times;
    std::vector<ClusterState> states;
    std::vector<double> taus;   // filled by the time-change route
    double leak = 0.0;          // integral of the suppressed boundary exchange rate
    HaltReason halt = HaltReason::ReachedEnd;
    double t_stop = 0.0;
};

// Adaptive embedded Runge-Kutta (Dormand-Prince 5(4)) oracle integrator.
// Halts at t_end, at M_lambda > blowup_ceiling * M_lambda(0), or on step
// underflow.
EdgTrajectory solve_edg_direct(const ClusterState& c0, double t_end, double tol,
                               std::vector<double> output_times,
                               double blowup_ceiling = 1e6);

struct TimeChangeMap {
    std::vector<double> tau_grid; // strictly increasing, starts at 0
    std::vector<double> t_of_tau; // strictly increasing, starts at 0
    std::vector<double> m0;       // M_0[u] along the grid
    std::vector<double> mlambda;  // M_lambda[u] along the grid
    std::optional<double> gel_time_estimate;

    double t_at(double tau) const;
    double tau_at(double t) const;
};

// Production route: run the density equation in the tau clock and invert the
// time change t(tau) = int_0^tau d sigma / M_lambda[u(sigma)].
struct TimeChangeResult {
    EdgTrajectory trajectory;
    TimeChangeMap map;
    bool truncation_contaminated = false;
};
TimeChangeResult solve_edg_timechange(const ClusterState& c0, double t_end,
                                      const HeatRunConfig& cfg,
                                      std::vector<double> output_times);

// ell = rho / sum_{k>=1} c_k; throws on the vacuum state.
double mean_cluster_size(const ClusterState& s);

struct PointMeasure {
    std::vector<double> x;
    std::vector<double> w;

    double total() const;
    double first_moment() const;
};

// mu = s * sum_{k>=1} c_k delta_{k/s}.
PointMeasure empirical_measure(const ClusterState& s, double scale);

} // namespace edg
