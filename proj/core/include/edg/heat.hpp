#pragma once

#include "edg/discrete.hpp"
#include "edg/profiles.hpp"

#include <vector>

namespace edg {

enum class HeatScheme { CrankNicolson, ExplicitRk4 };

struct HeatRunConfig {
    double lambda = 0.0;
    int n = 256;
    double t_end = 1.0;
    double dt_init = 1e-3;
    HeatScheme scheme = HeatScheme::CrankNicolson;
    std::vector<double> output_times; // sorted, positive; t_end appended if absent

    double dt_growth = 1.2;      // geometric growth after the initial layer
    double dt_cap_factor = 0.05; // dt <= cap_factor * t
    bool enforce_shape = false;  // retry with halved dt if a nonnegative
                                 // nonincreasing tail loses either property

    void validate() const;
};

struct HeatTrajectory {
    double lambda = 0.0;
    int n = 0;
    std::vector<double> times;
    std::vector<LatticeField> fields;
    std::vector<double> mass; // sum over k at each output time
    double leak = 0.0;        // integral of the suppressed boundary flux
    bool truncation_contaminated = false;
    long long steps = 0;

    const LatticeField& at(size_t i) const { return fields[i]; }
};

// Neumann problem dU/dt = L_lambda U with zero flux at both ends.
HeatTrajectory solve_np(const LatticeField& U0, const HeatRunConfig& cfg);

// Dirichlet problem for the density, run through the tail transform:
// u -> U -> solve_np -> -del^+ U.
HeatTrajectory solve_dp(const LatticeField& u0, const HeatRunConfig& cfg);

struct FundamentalSolutionTable {
    int source = 1;
    std::vector<double> times;
    std::vector<LatticeField> fields;
};

// Phi(t,.,l): solve_np from the indicator of {l}; requires l <= n/2.
FundamentalSolutionTable fundamental_solution(int l, const HeatRunConfig& cfg);

struct DecayRow {
    double t;
    double sup_scaled;    // ||U||_inf (1+t)^alpha
    double l2sq_scaled;   // ||U||_2^2 (1+t)^alpha
    double energy_scaled; // E_lambda(U) t^{alpha+1}
};

// Rescaled decay columns; `flagged` marks any column whose max/min ratio over
// t >= 1 exceeds `ratio_limit`.
struct DecayReport {
    std::vector<DecayRow> rows;
    double ratio_sup = 0.0, ratio_l2 = 0.0, ratio_energy = 0.0;
    bool flagged = false;
};
DecayReport decay_report(const HeatTrajectory& traj, double ratio_limit = 10.0);

struct SpacePair {
    double t;
    int k1, k2;
};
struct TimePair {
    double s, t;
    int k;
};

// |U(t,k2)-U(t,k1)| and |U(t,k)-U(s,k)| divided by their scale-invariant
// envelopes built from theta_lambda / omega_lambda. 0/0 reports as 0.
struct ContinuityReport {
    std::vector<double> space_moduli;
    std::vector<double> time_moduli;
    double max_space = 0.0, max_time = 0.0;
};
ContinuityReport continuity_report(const HeatTrajectory& traj, double u0_l1,
                                   const std::vector<SpacePair>& space_pairs,
                                   const std::vector<TimePair>& time_pairs);

// t -> M_mu[u(t)] t^{alpha(1-mu)} for a density trajectory.
struct MomentBoundReport {
    std::vector<double> t;
    std::vector<double> rescaled;
    bool bounded = true;
};
MomentBoundReport moment_bound_report(const HeatTrajectory& traj, double mu,
                                      double ratio_limit = 50.0);

} // namespace edg
