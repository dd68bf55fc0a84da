#include <doctest.h>

#include "edg/profiles.hpp"
#include "edg/quadrature.hpp"

#include <cmath>
#include <limits>

using namespace edg;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("parameter pack identities hold to one ulp") {
    for (double lam : {0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.49, 1.51, 1.75, 1.9}) {
        ProfileParams p(lam);
        CHECK(p.alpha * (2.0 - lam) == doctest::Approx(1.0).epsilon(1e-15));
        if (lam != 1.5)
            CHECK(p.beta * (3.0 - 2.0 * lam) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(p.alpha >= 0.5);
    }
    CHECK(std::isinf(ProfileParams(1.5).beta));
    CHECK(ProfileParams(1.0).beta > 0.0);
    CHECK(ProfileParams(1.75).beta < 0.0);
}

TEST_CASE("normalization constant against the Gamma formula") {
    // Z_0 = sqrt(pi) via Gamma(3/2) = sqrt(pi)/2.
    CHECK(ProfileParams(0.0).Z == doctest::Approx(std::sqrt(kPi)).epsilon(1e-12));
    for (double lam : {0.0, 0.5, 1.0, 1.5}) {
        ProfileParams p(lam);
        const double direct = std::pow(2.0 - lam, 2.0 / (2.0 - lam)) *
                              std::tgamma(1.0 + 1.0 / (2.0 - lam));
        CHECK(p.Z == doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("lambda domain is enforced") {
    CHECK_THROWS(ProfileParams(2.0));
    CHECK_THROWS(ProfileParams(-0.1));
    CHECK_THROWS(kernel_a(2.5, 3));
}

TEST_CASE("exchange rate examples") {
    CHECK(kernel_a(1.0, 3) == 3.0);
    CHECK(kernel_a(0.0, 0) == 0.0);
    CHECK(kernel_a(0.0, 7) == 1.0);
    CHECK(kernel_a(0.5, 4) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(kernel_a(1.5, 0) == 0.0);
}

TEST_CASE("density profile point values") {
    ProfileParams p0(0.0);
    CHECK(profile_g(p0, 0.0) == 0.0);
    // Z_0 = sqrt(pi): g_0(2) = (1/sqrt(pi)) e^{-1}.
    CHECK(profile_g(p0, 2.0) ==
          doctest::Approx(std::exp(-1.0) / std::sqrt(kPi)).epsilon(1e-13));
    CHECK(profile_g(p0, 2.0) == doctest::Approx(0.2075).epsilon(1e-3));
    CHECK(std::isinf(profile_g(ProfileParams(1.5), 0.0)));
}

TEST_CASE("profiles carry unit mass") {
    for (double lam : {0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75}) {
        ProfileParams p(lam);
        const double m1 =
            integrate_to_inf([&](double x) { return x * profile_g(p, x); }, 0.0, 1e-14, 1e-11)
                .value;
        const double mG =
            integrate_to_inf([&](double x) { return profile_G(p, x); }, 0.0, 1e-14, 1e-11)
                .value;
        CHECK(m1 == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(mG == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("tail profile point values and monotonicity") {
    ProfileParams p0(0.0);
    CHECK(profile_G(p0, 0.0) == doctest::Approx(1.0 / std::sqrt(kPi)).epsilon(1e-13));
    for (double x : {0.0, 0.5, 1.0, 2.0, 5.0})
        CHECK(profile_G(p0, x) ==
              doctest::Approx(std::exp(-x * x / 4.0) / std::sqrt(kPi)).epsilon(1e-13));
    double prev = profile_G(p0, 0.0);
    for (double x = 0.1; x < 8.0; x += 0.1) {
        const double cur = profile_G(p0, x);
        CHECK(cur <= prev);
        prev = cur;
    }
}

TEST_CASE("tail profile differences are density integrals") {
    for (double lam : {0.0, 1.0}) {
        ProfileParams p(lam);
        for (auto [a, b] : {std::pair{0.5, 1.5}, std::pair{1.0, 4.0}, std::pair{0.1, 0.2}}) {
            const double lhs = profile_G(p, a) - profile_G(p, b);
            const double rhs =
                integrate([&](double x) { return profile_g(p, x); }, a, b, 1e-14, 1e-12).value;
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
        }
    }
}

TEST_CASE("scaling solution: t=1 identity and mass invariance") {
    ProfileParams p0(0.0);
    CHECK(scaling_solution_gamma(p0, 1.0, 0.0) ==
          doctest::Approx(1.0 / std::sqrt(kPi)).epsilon(1e-13));
    ProfileParams p1(1.0);
    for (double x : {0.0, 0.7, 2.3})
        CHECK(scaling_solution_gamma(p1, 1.0, x) ==
              doctest::Approx(profile_G(p1, x)).epsilon(1e-14));
    const double mass =
        integrate_to_inf([&](double x) { return scaling_solution_gamma(p1, 4.0, x); }, 0.0,
                         1e-14, 1e-11)
            .value;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
    CHECK_THROWS(scaling_solution_gamma(p1, 0.0, 1.0));
}

TEST_CASE("continuity gauges") {
    CHECK(theta_modulus(ProfileParams(0.0), 2.5) == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(theta_modulus(ProfileParams(1.0), std::exp(1.0)) ==
          doctest::Approx(1.0).epsilon(1e-14));
    for (double lam : {0.0, 0.5, 1.0, 1.5})
        CHECK(omega_modulus(ProfileParams(lam), 1.0) == 0.0);
    for (double lam : {0.0, 0.5, 1.0, 1.5}) {
        ProfileParams p(lam);
        double prev = 0.0;
        for (double r : {1.1, 1.5, 2.0, 4.0}) {
            const double cur = omega_modulus(p, r);
            CHECK(cur > prev);
            prev = cur;
        }
    }
}

TEST_CASE("scaling solution satisfies the continuum equation to second order") {
    // Residual of d_t gamma - d_x(a d_x gamma) under central differences
    // shrinks by ~4x when the mesh halves.
    for (double lam : {0.0, 1.0}) {
        ProfileParams p(lam);
        auto residual_sup = [&](double h) {
            double worst = 0.0;
            for (double x = 0.2; x <= 3.0; x += 0.2) {
                const double dt_term =
                    (scaling_solution_gamma(p, 1.0 + h, x) -
                     scaling_solution_gamma(p, 1.0 - h, x)) /
                    (2.0 * h);
                auto flux = [&](double xx) {
                    return continuum_a(lam, xx) *
                           (scaling_solution_gamma(p, 1.0, xx + h) -
                            scaling_solution_gamma(p, 1.0, xx - h)) /
                           (2.0 * h);
                };
                const double dx_term = (flux(x + h) - flux(x - h)) / (2.0 * h);
                worst = std::max(worst, std::abs(dt_term - dx_term));
            }
            return worst;
        };
        const double r1 = residual_sup(1e-2);
        const double r2 = residual_sup(5e-3);
        CHECK(r2 < r1 / 2.5);
        CHECK(r1 < 1e-2);
    }
}
