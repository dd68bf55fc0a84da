#include "edg/continuum.hpp"

#include "edg/bessel.hpp"
#include "edg/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace edg {

namespace {

constexpr double kGl4Node[4] = {0.069431844202973714, 0.33000947820757187,
                                0.66999052179242813, 0.93056815579702629};
constexpr double kGl4Weight[4] = {0.17392742256872693, 0.32607257743127307,
                                  0.32607257743127307, 0.17392742256872693};

// Catmull-Rom cubic through the grid values, clamped at the ends.
double cubic_eval(const PLFunction& g, size_t cell, double s) {
    const size_t last = g.v.size() - 1;
    const double v1 = g.v[cell];
    const double v2 = g.v[cell + 1];
    const double v0 = (cell == 0) ? v1 : g.v[cell - 1];
    const double v3 = (cell + 2 > last) ? v2 : g.v[cell + 2];
    const double a0 = 2.0 * v1;
    const double a1 = v2 - v0;
    const double a2 = 2.0 * v0 - 5.0 * v1 + 4.0 * v2 - v3;
    const double a3 = -v0 + 3.0 * v1 - 3.0 * v2 + v3;
    return 0.5 * (a0 + s * (a1 + s * (a2 + s * a3)));
}

// Composite Simpson over the uniform grid (trapezoid fallback on the last
// cell for even node counts).
double grid_integral(const PLFunction& g) {
    const double h = g.dx();
    const size_t n = g.v.size();
    double s = 0.0;
    size_t i = 0;
    while (i + 2 < n) {
        s += h / 3.0 * (g.v[i] + 4.0 * g.v[i + 1] + g.v[i + 2]);
        i += 2;
    }
    if (i + 1 < n) s += 0.5 * h * (g.v[i] + g.v[i + 1]);
    return s;
}

} // namespace

double change_of_variables_z(double lambda, double x) {
    if (x < 0.0) throw std::invalid_argument("change_of_variables_z: need x >= 0");
    return 2.0 / (2.0 - lambda) * std::pow(x, 1.0 - 0.5 * lambda);
}

double change_of_variables_x(double lambda, double z) {
    if (z < 0.0) throw std::invalid_argument("change_of_variables_x: need z >= 0");
    return std::pow(0.5 * (2.0 - lambda) * z, 2.0 / (2.0 - lambda));
}

double psi_kernel(const ProfileParams& p, double t, double x, double y) {
    if (t <= 0.0) throw std::invalid_argument("psi_kernel: need t > 0");
    if (x < 0.0 || y < 0.0) throw std::invalid_argument("psi_kernel: need x,y >= 0");
    const double zx = change_of_variables_z(p.lambda, x);
    const double zy = change_of_variables_z(p.lambda, y);
    const double w = zx * zy / (2.0 * t);
    const double dz = zx - zy;
    const double log_pref = p.lambda * p.alpha * std::log(2.0 / (2.0 - p.lambda)) -
                            p.alpha * std::log(2.0 * t);
    const double expo = log_pref + log_h_scaled(p.c_bessel, w) - dz * dz / (4.0 * t);
    return std::exp(expo);
}

double domain_cut(const ProfileParams& p, double t, double tail_mass) {
    const double scale = std::pow(t, p.alpha);
    // Solve alpha^2 y^{2-lambda} = L as a first guess, then enlarge until the
    // quadrature tail drops below the target.
    const double L = std::max(5.0, -std::log(tail_mass));
    double y = std::pow(2.0 * L / (p.alpha * p.alpha), 1.0 / (2.0 - p.lambda));
    auto tail = [&](double y0) {
        return integrate_to_inf([&](double s) { return profile_G(p, s); }, y0,
                                1e-16, 1e-12)
            .value;
    };
    for (int i = 0; i < 60 && tail(y) > tail_mass; ++i) y *= 1.25;
    return y * scale;
}

SemigroupResult semigroup_apply(const ProfileParams& p, double t, const PLFunction& g) {
    if (t < 0.0) throw std::invalid_argument("semigroup_apply: need t >= 0");
    SemigroupResult res;
    if (t == 0.0) {
        res.f = g;
        return res;
    }
    const size_t n = g.v.size();
    const size_t cells = n - 1;
    const double h = g.dx();

    // Quadrature nodes, weights, z-values and interpolated g, shared by all
    // output points.
    std::vector<double> zy(cells * 4), gval(cells * 4), wq(cells * 4);
    for (size_t c = 0; c < cells; ++c) {
        for (int q = 0; q < 4; ++q) {
            const double s = kGl4Node[q];
            const double y = h * (static_cast<double>(c) + s);
            zy[c * 4 + q] = change_of_variables_z(p.lambda, y);
            gval[c * 4 + q] = cubic_eval(g, c, s);
            wq[c * 4 + q] = h * kGl4Weight[q];
        }
    }
    const double log_pref = p.lambda * p.alpha * std::log(2.0 / (2.0 - p.lambda)) -
                            p.alpha * std::log(2.0 * t);

    res.f.x_max = g.x_max;
    res.f.v.assign(n, 0.0);
    for (size_t i = 0; i < n; ++i) {
        const double x = h * static_cast<double>(i);
        const double zx = change_of_variables_z(p.lambda, x);
        double acc = 0.0;
        for (size_t j = 0; j < zy.size(); ++j) {
            const double w = zx * zy[j] / (2.0 * t);
            const double dz = zx - zy[j];
            const double expo = log_pref + log_h_scaled(p.c_bessel, w) - dz * dz / (4.0 * t);
            if (expo > -745.0) acc += wq[j] * std::exp(expo) * gval[j];
        }
        res.f.v[i] = acc;
    }
    double peak = 0.0;
    for (double v : res.f.v) peak = std::max(peak, std::abs(v));
    if (std::abs(res.f.v.back()) > 1e-10 * peak) res.domain_ok = false;
    return res;
}

EntropyFisher relative_entropy_fisher(const PLFunction& mu, const ProfileParams& p,
                                      double t, double rho) {
    if (!(rho > 0.0)) throw std::invalid_argument("relative_entropy_fisher: need rho > 0");
    const size_t n = mu.v.size();
    const double h = mu.dx();
    EntropyFisher out;

    std::vector<double> ref(n), ratio(n), logr(n);
    for (size_t i = 0; i < n; ++i) {
        const double x = h * static_cast<double>(i);
        ref[i] = rho * scaling_solution_gamma(p, t, x);
        double m = mu.v[i];
        if (m <= 0.0) {
            m = 1e-300;
            ++out.floored_cells;
        }
        ratio[i] = m / ref[i];
        logr[i] = std::log(ratio[i]);
    }
    PLFunction ent_integrand{mu.x_max, std::vector<double>(n)};
    PLFunction fish_integrand{mu.x_max, std::vector<double>(n)};
    for (size_t i = 0; i < n; ++i) {
        ent_integrand.v[i] = ref[i] * ratio[i] * logr[i];
        double slope;
        if (i == 0)
            slope = (logr[1] - logr[0]) / h;
        else if (i + 1 == n)
            slope = (logr[n - 1] - logr[n - 2]) / h;
        else
            slope = (logr[i + 1] - logr[i - 1]) / (2.0 * h);
        const double x = h * static_cast<double>(i);
        fish_integrand.v[i] = continuum_a(p.lambda, x) * slope * slope * std::max(mu.v[i], 0.0);
    }
    out.entropy = grid_integral(ent_integrand);
    out.fisher = grid_integral(fish_integrand);
    return out;
}

BobkovGotzeBounds bobkov_gotze_constants(const ProfileParams& p, int grid_points) {
    if (grid_points < 16) throw std::invalid_argument("bobkov_gotze_constants: grid too small");
    const double a2 = p.alpha * p.alpha;
    const double w = 2.0 - p.lambda;
    auto dens_mu = [&](double s) { return std::exp(-a2 * std::pow(s, w)); };
    auto inv_nu = [&](double s) {
        return std::pow(s, -p.lambda) * std::exp(a2 * std::pow(s, w));
    };
    const double e2 = std::exp(2.0);
    BobkovGotzeBounds out;

    // Left branch: x in (0,1).
    {
        const int m = grid_points;
        std::vector<double> xs(static_cast<size_t>(m));
        const double x_lo = 1e-8;
        for (int i = 0; i < m; ++i)
            xs[static_cast<size_t>(i)] =
                x_lo * std::pow((1.0 - 1e-6) / x_lo, static_cast<double>(i) / (m - 1));
        std::vector<double> cum_inv(static_cast<size_t>(m), 0.0); // int_x^1 1/nu
        double run = integrate([&](double s) { return inv_nu(s); }, xs.back(), 1.0, 1e-14, 1e-12).value;
        cum_inv[static_cast<size_t>(m) - 1] = run;
        for (int i = m - 2; i >= 0; --i) {
            run += integrate(inv_nu, xs[static_cast<size_t>(i)], xs[static_cast<size_t>(i) + 1], 1e-14, 1e-12).value;
            cum_inv[static_cast<size_t>(i)] = run;
        }
        double mu_run = integrate(dens_mu, 0.0, xs[0], 1e-16, 1e-12).value;
        int argmax = 0;
        for (int i = 0; i < m; ++i) {
            if (i > 0)
                mu_run += integrate(dens_mu, xs[static_cast<size_t>(i) - 1], xs[static_cast<size_t>(i)], 1e-16, 1e-12).value;
            const double val = mu_run * std::log1p(e2 / mu_run) * cum_inv[static_cast<size_t>(i)];
            if (val > out.b_minus) {
                out.b_minus = val;
                argmax = i;
            }
        }
        if (argmax >= m - 2) out.diverged = true;
    }

    // Right branch: x in (1, x_max].
    {
        const int m = grid_points;
        const double x_max = std::pow(600.0 / a2, 1.0 / w);
        std::vector<double> xs(static_cast<size_t>(m));
        for (int i = 0; i < m; ++i)
            xs[static_cast<size_t>(i)] =
                std::pow(x_max, static_cast<double>(i + 1) / m);
        std::vector<double> tail(static_cast<size_t>(m), 0.0);
        double run = integrate_to_inf(dens_mu, xs.back(), 1e-300, 1e-10).value;
        tail[static_cast<size_t>(m) - 1] = run;
        for (int i = m - 2; i >= 0; --i) {
            run += integrate(dens_mu, xs[static_cast<size_t>(i)], xs[static_cast<size_t>(i) + 1], 1e-300, 1e-12).value;
            tail[static_cast<size_t>(i)] = run;
        }
        double inv_run = 0.0;
        double prev_x = 1.0;
        int argmax = 0;
        std::vector<double> vals(static_cast<size_t>(m));
        for (int i = 0; i < m; ++i) {
            inv_run += integrate(inv_nu, prev_x, xs[static_cast<size_t>(i)], 1e-14, 1e-12).value;
            prev_x = xs[static_cast<size_t>(i)];
            const double ta = tail[static_cast<size_t>(i)];
            const double val = ta * std::log1p(e2 / ta) * inv_run;
            vals[static_cast<size_t>(i)] = val;
            if (val > out.b_plus) {
                out.b_plus = val;
                argmax = i;
            }
        }
        // Rising through the outer edge indicates the supremum escaped the grid.
        if (argmax >= m - 2 && vals[static_cast<size_t>(m) - 1] > 1.02 * vals[static_cast<size_t>(m) / 2])
            out.diverged = true;
    }
    out.c_lsi_bound = 4.0 * std::max(out.b_minus, out.b_plus);
    return out;
}

std::vector<double> lambda0_oracle_density(double t, int kmax,
                                           const std::vector<double>& u0) {
    if (t <= 0.0) throw std::invalid_argument("lambda0_oracle_density: need t > 0");
    const int l_max = static_cast<int>(u0.size()); // u0[l-1] is the mass at l
    const std::vector<double> phi = heat_phi_row(t, kmax + l_max + 1);
    std::vector<double> u(static_cast<size_t>(kmax), 0.0);
    for (int k = 1; k <= kmax; ++k) {
        double acc = 0.0;
        for (int l = 1; l <= l_max; ++l) {
            const double w0 = u0[static_cast<size_t>(l) - 1];
            if (w0 == 0.0) continue;
            acc += w0 * (phi[static_cast<size_t>(std::abs(k - l))] - phi[static_cast<size_t>(k + l)]);
        }
        u[static_cast<size_t>(k) - 1] = acc;
    }
    return u;
}

} // namespace edg
