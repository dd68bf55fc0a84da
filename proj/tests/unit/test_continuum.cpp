#include <doctest.h>

#include "edg/continuum.hpp"
#include "edg/bessel.hpp"
#include "edg/quadrature.hpp"

#include <cmath>
#include <random>

using namespace edg;

namespace {
constexpr double kPi = 3.14159265358979323846;

PLFunction sampled(double x_max, int nodes, const std::function<double(double)>& f) {
    PLFunction g{x_max, std::vector<double>(static_cast<size_t>(nodes))};
    const double h = x_max / (nodes - 1);
    for (int i = 0; i < nodes; ++i) g.v[static_cast<size_t>(i)] = f(h * i);
    return g;
}

double grid_mass(const PLFunction& g) { return pl_l1(g); }

} // namespace

TEST_CASE("change of variables and its inverse") {
    CHECK(change_of_variables_z(0.0, 1.7) == doctest::Approx(1.7).epsilon(1e-15));
    CHECK(change_of_variables_z(1.0, 4.0) == doctest::Approx(4.0).epsilon(1e-15));
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> dist(0.0, 30.0);
    for (double lam : {0.0, 0.5, 1.0, 1.5, 1.9}) {
        for (int rep = 0; rep < 50; ++rep) {
            const double x = dist(rng);
            const double back = change_of_variables_x(lam, change_of_variables_z(lam, x));
            CHECK(back == doctest::Approx(x).epsilon(1e-12));
        }
    }
}

TEST_CASE("kernel at lambda=0 equals the reflected gaussian") {
    ProfileParams p(0.0);
    for (double t : {0.3, 1.0, 4.0}) {
        for (double x : {0.0, 0.4, 1.3}) {
            for (double y : {0.0, 0.9, 2.2}) {
                const double ref = (std::exp(-(x - y) * (x - y) / (4.0 * t)) +
                                    std::exp(-(x + y) * (x + y) / (4.0 * t))) /
                                   std::sqrt(4.0 * kPi * t);
                CHECK(psi_kernel(p, t, x, y) == doctest::Approx(ref).epsilon(1e-12));
            }
        }
    }
    CHECK(psi_kernel(p, 1.0, 0.0, 0.0) == doctest::Approx(0.5642).epsilon(1e-4));
}

TEST_CASE("kernel at y=0 is the scaling solution") {
    for (double lam : {0.0, 0.5, 1.0}) {
        ProfileParams p(lam);
        double worst = 0.0;
        for (double x = 0.0; x <= 4.0; x += 0.05)
            worst = std::max(worst, std::abs(psi_kernel(p, 1.0, x, 0.0) - profile_G(p, x)));
        CHECK(worst <= 1e-10);
        // And at other times against gamma(t,.).
        for (double t : {0.25, 4.0})
            CHECK(psi_kernel(p, t, 1.0, 0.0) ==
                  doctest::Approx(scaling_solution_gamma(p, t, 1.0)).epsilon(1e-11));
    }
}

TEST_CASE("kernel symmetry is exact") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> dist(0.0, 8.0);
    for (double lam : {0.0, 0.5, 1.0, 1.5}) {
        ProfileParams p(lam);
        for (int rep = 0; rep < 100; ++rep) {
            const double t = 0.1 + dist(rng) / 4.0;
            const double x = dist(rng), y = dist(rng);
            const double a = psi_kernel(p, t, x, y);
            const double b = psi_kernel(p, t, y, x);
            CHECK(std::abs(a - b) <= 1e-12 * std::max(a, b));
        }
    }
}

TEST_CASE("kernel mass and delta limit") {
    for (double lam : {0.0, 0.5, 1.0, 1.5}) {
        ProfileParams p(lam);
        for (double y : {0.0, 1.0, 5.0}) {
            const double mass =
                integrate_to_inf([&](double x) { return psi_kernel(p, lam == 0.0 ? 1.0 : 1.0, x, y); },
                                 0.0, 1e-13, 1e-9)
                    .value;
            CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
        }
    }
    // int Psi(t,x,y) g(x) dx -> g(y) with O(t) error.
    ProfileParams p(1.0);
    auto g = [](double x) { return std::exp(-(x - 2.0) * (x - 2.0)); };
    const double y0 = 2.0;
    auto smeared = [&](double t) {
        return integrate_to_inf([&](double x) { return psi_kernel(p, t, x, y0) * g(x); }, 0.0,
                                1e-13, 1e-10)
            .value;
    };
    const double e1 = std::abs(smeared(1e-2) - g(y0));
    const double e2 = std::abs(smeared(1e-3) - g(y0));
    CHECK(e1 < 0.05);
    CHECK(e2 < e1 / 3.0);
}

TEST_CASE("kernel solves the continuum equation at interior points") {
    for (double lam : {0.0, 1.0, 1.5}) {
        ProfileParams p(lam);
        const double y = 1.5;
        auto residual_sup = [&](double h) {
            double worst = 0.0;
            for (double x = 0.4; x <= 2.5; x += 0.3) {
                const double dt_term =
                    (psi_kernel(p, 1.0 + h, x, y) - psi_kernel(p, 1.0 - h, x, y)) / (2.0 * h);
                auto flux = [&](double xx) {
                    return continuum_a(lam, xx) *
                           (psi_kernel(p, 1.0, xx + h, y) - psi_kernel(p, 1.0, xx - h, y)) /
                           (2.0 * h);
                };
                const double dx_term = (flux(x + h) - flux(x - h)) / (2.0 * h);
                worst = std::max(worst, std::abs(dt_term - dx_term));
            }
            return worst;
        };
        const double r1 = residual_sup(2e-2);
        const double r2 = residual_sup(1e-2);
        CHECK(r2 < r1 / 2.5);
    }
}

TEST_CASE("semigroup: identity at t=0, mass, contraction") {
    ProfileParams p(1.0);
    // a(x) = x transports mass fast to the right; the grid must hold the
    // kernel spread at t = 1.
    PLFunction g = sampled(26.0, 2601, [](double x) {
        return std::exp(-(x - 2.0) * (x - 2.0) / 0.5);
    });
    SemigroupResult id = semigroup_apply(p, 0.0, g);
    CHECK(id.f.v == g.v);

    SemigroupResult ev = semigroup_apply(p, 1.0, g);
    CHECK(ev.domain_ok);
    CHECK(grid_mass(ev.f) == doctest::Approx(grid_mass(g)).epsilon(1e-6));

    // L^p contraction on sampled norms.
    CHECK(pl_l1(ev.f) <= pl_l1(g) * (1.0 + 1e-6));
    CHECK(pl_l2sq(ev.f) <= pl_l2sq(g) * (1.0 + 1e-6));
    double sup_in = 0.0, sup_out = 0.0;
    for (double v : g.v) sup_in = std::max(sup_in, std::abs(v));
    for (double v : ev.f.v) sup_out = std::max(sup_out, std::abs(v));
    CHECK(sup_out <= sup_in * (1.0 + 1e-9));
}

TEST_CASE("semigroup composition property") {
    ProfileParams p(0.5);
    PLFunction g = sampled(14.0, 1401, [](double x) {
        return std::exp(-(x - 2.0) * (x - 2.0) / 0.5);
    });
    const PLFunction one_then_one = semigroup_apply(p, 1.0, semigroup_apply(p, 1.0, g).f).f;
    const PLFunction two = semigroup_apply(p, 2.0, g).f;
    double worst = 0.0;
    for (size_t i = 0; i < two.v.size(); ++i)
        worst = std::max(worst, std::abs(one_then_one.v[i] - two.v[i]));
    CHECK(worst <= 1e-5);
}

TEST_CASE("relative entropy vanishes exactly on the profile") {
    for (double lam : {0.0, 1.0}) {
        ProfileParams p(lam);
        const double rho = 0.7, t = 1.0;
        PLFunction mu = sampled(domain_cut(p, t, 1e-12), 2001, [&](double x) {
            return rho * scaling_solution_gamma(p, t, x);
        });
        EntropyFisher ef = relative_entropy_fisher(mu, p, t, rho);
        CHECK(std::abs(ef.entropy) <= 1e-8);
        CHECK(std::abs(ef.fisher) <= 1e-8);
    }
}

TEST_CASE("entropy decreases along the flow and obeys the LSI bound") {
    ProfileParams p(1.0);
    const double rho = 1.0;
    const double t0 = 1.0;
    const double X = domain_cut(p, 4.0, 1e-12);
    PLFunction mu0 = sampled(X, 1601, [&](double x) {
        return rho * scaling_solution_gamma(p, t0, x) * (1.0 + 0.1 * std::sin(x));
    });
    // Normalize the perturbation back to mass rho.
    const double mass0 = pl_l1(mu0);
    for (double& v : mu0.v) v *= rho / mass0;

    const BobkovGotzeBounds bg = bobkov_gotze_constants(p);
    CHECK(!bg.diverged);
    double prev = 1e300;
    for (double dt : {0.0, 0.25, 0.5, 1.0, 2.0}) {
        PLFunction mu = dt == 0.0 ? mu0 : semigroup_apply(p, dt, mu0).f;
        EntropyFisher ef = relative_entropy_fisher(mu, p, t0 + dt, rho);
        // The quadrature/evolution noise floor sits near the semigroup's
        // 1e-6 mass tolerance.
        CHECK(ef.entropy >= -1e-5);
        CHECK(ef.entropy <= prev + 5e-6);
        CHECK(ef.entropy <= 4.0 * bg.c_lsi_bound * (t0 + dt) * ef.fisher + 1e-5);
        prev = ef.entropy;
    }
}

TEST_CASE("log-Sobolev bound quantities are finite and grid-stable") {
    for (double lam : {0.0, 1.0, 1.5}) {
        ProfileParams p(lam);
        BobkovGotzeBounds coarse = bobkov_gotze_constants(p, 200);
        BobkovGotzeBounds fine = bobkov_gotze_constants(p, 400);
        CHECK(std::isfinite(coarse.b_minus));
        CHECK(std::isfinite(coarse.b_plus));
        CHECK(!fine.diverged);
        CHECK(fine.b_minus == doctest::Approx(coarse.b_minus).epsilon(0.01));
        CHECK(fine.b_plus == doctest::Approx(coarse.b_plus).epsilon(0.01));
        CHECK(fine.c_lsi_bound == doctest::Approx(4.0 * std::max(fine.b_minus, fine.b_plus))
                                      .epsilon(1e-15));
    }
}

TEST_CASE("lambda=0 oracle superposition scales onto the limit shape") {
    // t u(t, x sqrt(t)) ~ rho x exp(-x^2/4)/sqrt(4 pi) for monodisperse data.
    const double rho = 0.8;
    const double t = 1e4;
    for (double x : {0.5, 1.0, 2.0, 3.0}) {
        const double u = rho * heat_psi_real(t, x * std::sqrt(t), 1);
        const double target = rho * x * std::exp(-x * x / 4.0) / std::sqrt(4.0 * kPi);
        CHECK(t * u / target == doctest::Approx(1.0).epsilon(0.03));
    }
}
