#include <doctest.h>

#include "edg/cluster.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace edg;

namespace {

ClusterState random_state(int n, double lambda, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    std::vector<double> c(static_cast<size_t>(n) + 1, 0.0);
    double m0 = 0.0, m1 = 0.0;
    for (int k = 1; k <= n / 2; ++k) {
        c[static_cast<size_t>(k)] = dist(rng) / static_cast<double>(k * k);
        m0 += c[static_cast<size_t>(k)];
        m1 += k * c[static_cast<size_t>(k)];
    }
    // Close the volume with empty sites.
    const double scale = 0.5 / m0;
    for (int k = 1; k <= n; ++k) c[static_cast<size_t>(k)] *= scale;
    c[0] = 0.5;
    return ClusterState(std::move(c), lambda, m1 * scale);
}

} // namespace

TEST_CASE("state invariants and presets") {
    ClusterState mono = monodisperse_state(1.0, 0.5, 64);
    CHECK_NOTHROW(mono.validate(1e-14));
    CHECK(mono.volume() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(mono.mass() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK_THROWS(monodisperse_state(1.0, 1.5, 64));

    ClusterState geo = geometric_state(0.5, 0.8, 0.6, 256);
    CHECK_NOTHROW(geo.validate(1e-12));
    CHECK(geo.mass() == doctest::Approx(0.8).epsilon(1e-13));
    CHECK(geo.volume() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK_THROWS(geometric_state(0.5, 12.0, 0.5, 64)); // volume impossible
}

TEST_CASE("vacuum is the equilibrium") {
    std::vector<double> c(65, 0.0);
    c[0] = 1.0;
    ClusterState vac(std::move(c), 1.0, 0.0);
    for (double r : edg_rhs(vac)) CHECK(r == 0.0);
}

TEST_CASE("right-hand side point values") {
    // c = (0.5, 0.25, 0.125, 0.125, 0, ...), lambda = 1:
    // M_1 = 0.875, cdot_0 = 0.875*0.25, cdot_1 = 0.875*(-2*0.25 + 2*0.125).
    std::vector<double> c(64, 0.0);
    c[0] = 0.5;
    c[1] = 0.25;
    c[2] = 0.125;
    c[3] = 0.125;
    ClusterState s(std::move(c), 1.0, 0.875);
    CHECK(s.m_lambda() == doctest::Approx(0.875).epsilon(1e-15));
    const std::vector<double> rhs = edg_rhs(s);
    CHECK(rhs[0] == doctest::Approx(0.21875).epsilon(1e-14));
    CHECK(rhs[1] == doctest::Approx(-0.21875).epsilon(1e-14));
}

TEST_CASE("both conservation laws hold for the right-hand side") {
    std::mt19937_64 rng(29);
    for (double lam : {0.0, 0.5, 1.0, 1.75}) {
        for (int rep = 0; rep < 10; ++rep) {
            ClusterState s = random_state(128, lam, rng);
            const std::vector<double> rhs = edg_rhs(s);
            double s0 = 0.0, s1 = 0.0, scale = 0.0;
            for (size_t k = 0; k < rhs.size(); ++k) {
                s0 += rhs[k];
                s1 += static_cast<double>(k) * rhs[k];
                scale += std::abs(static_cast<double>(k) * rhs[k]);
            }
            CHECK(std::abs(s0) <= 1e-14 * std::max(1.0, scale));
            CHECK(std::abs(s1) <= 1e-13 * std::max(1.0, scale));
        }
    }
}

TEST_CASE("direct integration conserves volume and mass") {
    ClusterState c0 = monodisperse_state(0.0, 0.5, 128);
    EdgTrajectory traj = solve_edg_direct(c0, 100.0, 1e-10, {1.0, 10.0, 100.0});
    CHECK(traj.halt == HaltReason::ReachedEnd);
    for (const ClusterState& s : traj.states) {
        CHECK(std::abs(s.volume() - 1.0) <= 1e-8);
        CHECK(std::abs(s.mass() - 0.5) <= 1e-8);
    }
    CHECK(traj.leak <= 1e-6);
    // c_0 is nondecreasing, M_0 over k>=1 nonincreasing.
    for (size_t i = 1; i < traj.states.size(); ++i) {
        CHECK(traj.states[i].c[0] >= traj.states[i - 1].c[0] - 1e-12);
        CHECK(traj.states[i].m0_living() <= traj.states[i - 1].m0_living() + 1e-12);
    }
}

TEST_CASE("vacuum trajectory is constant") {
    std::vector<double> c(65, 0.0);
    c[0] = 1.0;
    ClusterState vac(std::move(c), 1.0, 0.0);
    EdgTrajectory traj = solve_edg_direct(vac, 5.0, 1e-10, {5.0});
    CHECK(traj.states.back().c[0] == 1.0);
    CHECK(traj.states.back().m0_living() == 0.0);
}

TEST_CASE("gelation regime halts in finite time") {
    ClusterState c0 = monodisperse_state(1.75, 1.0, 2048);
    EdgTrajectory traj = solve_edg_direct(c0, 1e9, 1e-9, {1e9}, 100.0);
    CHECK(traj.halt == HaltReason::Blowup);
    CHECK(traj.t_stop > 0.0);
    CHECK(traj.t_stop < 1e3);
}

TEST_CASE("time change map bookkeeping") {
    ClusterState c0 = monodisperse_state(1.0, 0.5, 256);
    HeatRunConfig cfg;
    cfg.lambda = 1.0;
    cfg.n = 256;
    cfg.t_end = 10.0;
    TimeChangeResult tc = solve_edg_timechange(c0, 10.0, cfg, {1.0, 10.0});
    const TimeChangeMap& map = tc.map;
    CHECK(map.t_of_tau.front() == 0.0);
    CHECK(map.tau_grid.front() == 0.0);
    for (size_t i = 1; i < map.tau_grid.size(); ++i) {
        CHECK(map.tau_grid[i] > map.tau_grid[i - 1]);
        CHECK(map.t_of_tau[i] > map.t_of_tau[i - 1]);
    }
    // For lambda = 1 the rate M_1 = rho is conserved, so tau = rho t exactly.
    CHECK(map.tau_at(10.0) == doctest::Approx(5.0).epsilon(1e-6));
    CHECK(map.t_at(map.tau_grid.back()) ==
          doctest::Approx(map.t_of_tau.back()).epsilon(1e-12));
    CHECK_THROWS(map.t_at(map.tau_grid.back() * 2.0));

    for (const ClusterState& s : tc.trajectory.states) {
        CHECK(std::abs(s.volume() - 1.0) <= 1e-9);
        CHECK(std::abs(s.mass() - 0.5) <= 1e-9);
    }
}

TEST_CASE("direct and time-change routes agree") {
    for (double lam : {0.0, 1.0}) {
        ClusterState c0 = monodisperse_state(lam, 0.5, 256);
        EdgTrajectory direct = solve_edg_direct(c0, 10.0, 1e-11, {1.0, 10.0});
        HeatRunConfig cfg;
        cfg.lambda = lam;
        cfg.n = 256;
        cfg.t_end = 10.0;
        cfg.dt_init = 1e-4;
        cfg.dt_cap_factor = 0.005;
        TimeChangeResult tc = solve_edg_timechange(c0, 10.0, cfg, {1.0, 10.0});
        for (size_t i = 0; i < direct.times.size(); ++i) {
            double worst = 0.0;
            for (size_t k = 0; k < direct.states[i].c.size(); ++k)
                worst = std::max(worst, std::abs(direct.states[i].c[k] -
                                                 tc.trajectory.states[i].c[k]));
            CHECK(worst <= 1e-4);
        }
    }
}

TEST_CASE("mean cluster size") {
    ClusterState mono = monodisperse_state(1.0, 0.5, 64);
    CHECK(mean_cluster_size(mono) == doctest::Approx(1.0).epsilon(1e-14));
    std::vector<double> c(65, 0.0);
    c[0] = 0.75;
    c[2] = 0.25;
    ClusterState pairs(std::move(c), 1.0, 0.5);
    CHECK(mean_cluster_size(pairs) == doctest::Approx(2.0).epsilon(1e-14));
    std::vector<double> v(65, 0.0);
    v[0] = 1.0;
    CHECK_THROWS(mean_cluster_size(ClusterState(std::move(v), 1.0, 0.0)));
}

TEST_CASE("empirical measure identities") {
    std::mt19937_64 rng(31);
    ClusterState s = random_state(128, 1.0, rng);
    for (double scale : {1.0, 2.5, 40.0}) {
        PointMeasure mu = empirical_measure(s, scale);
        CHECK(mu.first_moment() == doctest::Approx(s.rho).epsilon(1e-12));
        CHECK(mu.total() == doctest::Approx(scale * s.m0_living()).epsilon(1e-12));
    }
    PointMeasure unit = empirical_measure(s, 1.0);
    CHECK(unit.x[2] == 3.0);
    CHECK(unit.w[2] == s.c[3]);
}
