#include <doctest.h>

#include "edg/continuum.hpp"
#include "edg/heat.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

using namespace edg;

namespace {

LatticeField delta_field(int n, int at, double lambda, double height = 1.0) {
    std::vector<double> v(static_cast<size_t>(n), 0.0);
    v[static_cast<size_t>(at) - 1] = height;
    return LatticeField(std::move(v), lambda);
}

HeatRunConfig basic_cfg(double lambda, int n, double t_end) {
    HeatRunConfig cfg;
    cfg.lambda = lambda;
    cfg.n = n;
    cfg.t_end = t_end;
    cfg.dt_init = 1e-3;
    return cfg;
}

} // namespace

TEST_CASE("config validation") {
    HeatRunConfig cfg = basic_cfg(1.0, 64, 1.0);
    CHECK_NOTHROW(cfg.validate());
    cfg.dt_init = 2.0;
    CHECK_THROWS(cfg.validate());
    cfg = basic_cfg(1.0, 256, 1.0);
    cfg.scheme = HeatScheme::ExplicitRk4;
    cfg.dt_init = 1e-2; // above 0.4 N^-lambda
    CHECK_THROWS(cfg.validate());
    cfg.dt_init = 1e-3;
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("zero and constant data are invariant") {
    HeatRunConfig cfg = basic_cfg(1.0, 32, 2.0);
    std::vector<double> zero(32, 0.0);
    HeatTrajectory tz = solve_np(LatticeField(zero, 1.0), cfg);
    for (double x : tz.fields.back().v) CHECK(x == 0.0);

    std::vector<double> ones(32, 0.7);
    HeatTrajectory tc = solve_np(LatticeField(ones, 1.0), cfg);
    for (double x : tc.fields.back().v) CHECK(x == doctest::Approx(0.7).epsilon(1e-13));
}

TEST_CASE("Crank-Nicolson conserves mass at the linear-algebra level") {
    // Column sums of one CN step applied to each basis vector stay 1.
    const int n = 48;
    HeatRunConfig cfg = basic_cfg(1.3, n, 0.5);
    cfg.dt_init = 0.5; // a single coarse step
    cfg.dt_growth = 1.0;
    for (int j = 1; j <= n; j += 7) {
        HeatTrajectory traj = solve_np(delta_field(n, j, 1.3), cfg);
        CHECK(traj.mass.back() == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(traj.steps == 1);
    }
}

TEST_CASE("mass conservation over long runs") {
    for (double lam : {0.0, 1.0, 1.5}) {
        HeatRunConfig cfg = basic_cfg(lam, 512, 100.0);
        HeatTrajectory traj = solve_np(tail_transform(delta_field(512, 1, lam)), cfg);
        CHECK(traj.mass.back() == doctest::Approx(traj.mass.front()).epsilon(1e-10));
    }
}

TEST_CASE("tail shape is preserved") {
    HeatRunConfig cfg = basic_cfg(1.0, 256, 10.0);
    cfg.enforce_shape = true;
    HeatTrajectory traj = solve_np(tail_transform(delta_field(256, 1, 1.0, 0.5)), cfg);
    const LatticeField& last = traj.fields.back();
    for (int k = 1; k <= 255; ++k) {
        CHECK(last.at_k(k) >= -1e-13);
        CHECK(last.at_k(k + 1) <= last.at_k(k) + 1e-13);
    }
}

TEST_CASE("semigroup property under a fixed step") {
    for (double lam : {0.0, 1.0}) {
        const int n = 128;
        LatticeField u0 = tail_transform(delta_field(n, 1, lam));
        HeatRunConfig cfg = basic_cfg(lam, n, 2.0);
        cfg.dt_growth = 1.0; // fixed dt
        HeatTrajectory full = solve_np(u0, cfg);

        HeatRunConfig half = cfg;
        half.t_end = 1.0;
        HeatTrajectory first = solve_np(u0, half);
        HeatTrajectory second = solve_np(first.fields.back(), half);
        double worst = 0.0;
        for (int k = 1; k <= n; ++k)
            worst = std::max(worst,
                             std::abs(second.fields.back().at_k(k) - full.fields.back().at_k(k)));
        CHECK(worst <= 1e-8);
    }
}

TEST_CASE("second-order consistency in the step size") {
    const int n = 96;
    LatticeField u0 = tail_transform(delta_field(n, 1, 1.0));
    auto run_fixed = [&](double dt) {
        HeatRunConfig cfg = basic_cfg(1.0, n, 1.0);
        cfg.dt_init = dt;
        cfg.dt_growth = 1.0;
        return solve_np(u0, cfg).fields.back();
    };
    const LatticeField ref = run_fixed(1.0 / 512.0);
    auto err = [&](const LatticeField& f) {
        double worst = 0.0;
        for (int k = 1; k <= n; ++k) worst = std::max(worst, std::abs(f.at_k(k) - ref.at_k(k)));
        return worst;
    };
    const double e1 = err(run_fixed(1.0 / 16.0));
    const double e2 = err(run_fixed(1.0 / 32.0));
    CHECK(e1 / e2 > 3.0);
    CHECK(e1 / e2 < 5.5);
}

TEST_CASE("density solver: conservation and boundary loss rate") {
    HeatRunConfig cfg = basic_cfg(1.0, 512, 100.0);
    std::vector<double> outs;
    for (double t = 1.0; t <= 100.0; t *= 1.2) outs.push_back(t);
    outs.push_back(100.0);
    // Central-difference probes around t = 10.
    outs.push_back(9.95);
    outs.push_back(10.0);
    outs.push_back(10.05);
    std::sort(outs.begin(), outs.end());
    cfg.output_times = outs;
    cfg.dt_cap_factor = 0.02;
    HeatTrajectory traj = solve_dp(delta_field(512, 1, 1.0), cfg);

    CHECK(traj.mass.back() == doctest::Approx(traj.mass.front()).epsilon(1e-8));

    auto at = [&](double t) -> const LatticeField& {
        for (size_t i = 0; i < traj.times.size(); ++i)
            if (std::abs(traj.times[i] - t) < 1e-9) return traj.fields[i];
        throw std::runtime_error("missing snapshot");
    };
    const double m0_lo = moment(at(9.95), 0.0);
    const double m0_hi = moment(at(10.05), 0.0);
    const double deriv = (m0_hi - m0_lo) / 0.1;
    const double u1 = at(10.0).at_k(1);
    CHECK(deriv + u1 == doctest::Approx(0.0).epsilon(1e-4));
}

TEST_CASE("lambda=0 short run against the explicit kernel") {
    const int n = 512;
    HeatRunConfig cfg = basic_cfg(0.0, n, 5.0);
    cfg.dt_cap_factor = 0.005;
    HeatTrajectory traj = solve_dp(delta_field(n, 1, 0.0), cfg);
    const std::vector<double> oracle = lambda0_oracle_density(5.0, 200, {1.0});
    double worst = 0.0;
    for (int k = 1; k <= 200; ++k)
        worst = std::max(worst, std::abs(traj.fields.back().at_k(k) -
                                         oracle[static_cast<size_t>(k) - 1]));
    CHECK(worst <= 1e-6);
}

TEST_CASE("fundamental solution: initial data, mass, symmetry") {
    HeatRunConfig cfg = basic_cfg(1.0, 256, 10.0);
    cfg.output_times = {1e-3, 10.0};
    FundamentalSolutionTable phi1 = fundamental_solution(1, cfg);
    FundamentalSolutionTable phi5 = fundamental_solution(5, cfg);
    double m = 0.0;
    for (double x : phi1.fields.back().v) m += x;
    CHECK(m == doctest::Approx(1.0).epsilon(1e-10));
    for (double x : phi1.fields.back().v) CHECK(x >= -1e-14);
    CHECK(phi1.fields.back().at_k(5) ==
          doctest::Approx(phi5.fields.back().at_k(1)).epsilon(1e-8));
    CHECK_THROWS(fundamental_solution(200, cfg));
}

TEST_CASE("two schemes agree at small size") {
    const int n = 64;
    LatticeField u0 = tail_transform(delta_field(n, 1, 1.0, 0.5));
    HeatRunConfig cn = basic_cfg(1.0, n, 1.0);
    cn.dt_init = 1e-3;
    cn.dt_growth = 1.0;
    HeatRunConfig rk = cn;
    rk.scheme = HeatScheme::ExplicitRk4;
    rk.dt_init = 0.4 / n;
    const LatticeField a = solve_np(u0, cn).fields.back();
    const LatticeField b = solve_np(u0, rk).fields.back();
    double worst = 0.0;
    for (int k = 1; k <= n; ++k) worst = std::max(worst, std::abs(a.at_k(k) - b.at_k(k)));
    CHECK(worst <= 1e-7);
}

TEST_CASE("reports on trivial input") {
    HeatRunConfig cfg = basic_cfg(1.0, 32, 2.0);
    std::vector<double> zero(32, 0.0);
    HeatTrajectory traj = solve_np(LatticeField(zero, 1.0), cfg);
    DecayReport rep = decay_report(traj);
    for (const DecayRow& row : rep.rows) {
        CHECK(row.sup_scaled == 0.0);
        CHECK(row.l2sq_scaled == 0.0);
        CHECK(row.energy_scaled == 0.0);
    }
    HeatRunConfig cfg2 = basic_cfg(1.0, 64, 4.0);
    cfg2.output_times = {1.0, 2.0, 4.0};
    HeatTrajectory tr2 = solve_np(tail_transform(delta_field(64, 1, 1.0)), cfg2);
    ContinuityReport cont = continuity_report(
        tr2, 1.0, {{2.0, 3, 3}}, {{2.0, 2.0, 4}});
    CHECK(cont.space_moduli[0] == 0.0);
    CHECK(cont.time_moduli[0] == 0.0);
}

TEST_CASE("moment bound report columns stay bounded") {
    HeatRunConfig cfg = basic_cfg(1.0, 512, 50.0);
    std::vector<double> outs;
    for (double t = 1.0; t <= 50.0; t *= 1.3) outs.push_back(t);
    outs.push_back(50.0);
    cfg.output_times = outs;
    HeatTrajectory traj = solve_dp(delta_field(512, 1, 1.0, 0.5), cfg);
    // mu = 1 column is the conserved mass itself.
    MomentBoundReport m1 = moment_bound_report(traj, 1.0);
    for (double r : m1.rescaled) CHECK(r == doctest::Approx(0.5).epsilon(1e-8));
    MomentBoundReport mhalf = moment_bound_report(traj, 0.5);
    CHECK(mhalf.bounded);
}
