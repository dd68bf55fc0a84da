#include "edg/scaling.hpp"

#include "edg/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace edg {

double RescaledField::cell() const { return std::pow(epsilon, alpha); }
double RescaledField::x_limit() const { return cell() * static_cast<double>(u.size()); }

double RescaledField::eval(double x) const {
    if (x < 0.0) throw std::invalid_argument("RescaledField::eval: need x >= 0");
    const double s = std::pow(epsilon, -alpha);
    const size_t k = static_cast<size_t>(std::floor(s * x)); // cell index = k+1
    if (k >= u.size()) return 0.0;
    return s * u[k];
}

double RescaledField::mass() const {
    double m = 0.0;
    for (double x : u) m += x;
    return m;
}

RescaledField iota_embed(const std::vector<double>& U, double epsilon, double alpha) {
    if (!(epsilon > 0.0 && epsilon <= 1.0))
        throw std::invalid_argument("iota_embed: need epsilon in (0,1]");
    RescaledField f;
    f.epsilon = epsilon;
    f.alpha = alpha;
    f.u = U;
    return f;
}

namespace {

// Exact integral of a step function over [a,b).
double step_integral(const RescaledField& mu, double a, double b) {
    const double h = mu.cell();
    const double s = 1.0 / h; // eps^{-alpha}
    double acc = 0.0;
    const size_t k_lo = static_cast<size_t>(std::max(0.0, std::floor(a / h)));
    for (size_t k = k_lo; k < mu.u.size(); ++k) {
        const double lo = std::max(a, h * static_cast<double>(k));
        const double hi = std::min(b, h * static_cast<double>(k + 1));
        if (hi <= lo) {
            if (h * static_cast<double>(k) >= b) break;
            continue;
        }
        acc += (hi - lo) * s * mu.u[k];
    }
    return acc;
}

} // namespace

std::vector<double> pi_project(const RescaledField& mu, double epsilon, int kmax) {
    const double h = std::pow(epsilon, mu.alpha);
    std::vector<double> out(static_cast<size_t>(kmax));
    if (epsilon == mu.epsilon) {
        // Cells align with the step function: the round trip is the identity.
        for (int k = 1; k <= kmax; ++k)
            out[static_cast<size_t>(k) - 1] =
                (static_cast<size_t>(k) <= mu.u.size()) ? mu.u[static_cast<size_t>(k) - 1] : 0.0;
        return out;
    }
    for (int k = 1; k <= kmax; ++k)
        out[static_cast<size_t>(k) - 1] =
            step_integral(mu, h * static_cast<double>(k - 1), h * static_cast<double>(k));
    return out;
}

double pl_integral_over(const PLFunction& f, double a, double b) {
    const double h = f.dx();
    const size_t cells = f.v.size() - 1;
    a = std::max(a, 0.0);
    b = std::min(b, f.x_max);
    if (b <= a) return 0.0;
    double acc = 0.0;
    size_t c_lo = static_cast<size_t>(std::floor(a / h));
    if (c_lo >= cells) return 0.0;
    for (size_t c = c_lo; c < cells; ++c) {
        const double x0 = h * static_cast<double>(c);
        const double lo = std::max(a, x0);
        const double hi = std::min(b, x0 + h);
        if (hi <= lo) break;
        // Linear on the cell: exact trapezoid of the sub-interval.
        const double s_lo = (lo - x0) / h;
        const double s_hi = (hi - x0) / h;
        const double f_lo = f.v[c] + s_lo * (f.v[c + 1] - f.v[c]);
        const double f_hi = f.v[c] + s_hi * (f.v[c + 1] - f.v[c]);
        acc += 0.5 * (f_lo + f_hi) * (hi - lo);
    }
    return acc;
}

std::vector<double> pi_project(const PLFunction& density, double epsilon, double alpha,
                               int kmax) {
    const double h = std::pow(epsilon, alpha);
    std::vector<double> out(static_cast<size_t>(kmax));
    for (int k = 1; k <= kmax; ++k)
        out[static_cast<size_t>(k) - 1] =
            pl_integral_over(density, h * static_cast<double>(k - 1), h * static_cast<double>(k));
    return out;
}

RescaledField rescaled_solution(const LatticeField& U, double t, double alpha) {
    if (!(t > 0.0)) throw std::invalid_argument("rescaled_solution: need t > 0");
    RescaledField f;
    f.epsilon = 1.0 / t;
    f.alpha = alpha;
    f.u = U.v;
    return f;
}

SelfSimilarityError self_similarity_error(const LatticeField& U, double t,
                                          double delta, double X,
                                          const ProfileParams& p, double rho) {
    if (!(delta >= 0.0 && X > delta))
        throw std::invalid_argument("self_similarity_error: bad window");
    RescaledField hat = rescaled_solution(U, t, p.alpha);
    SelfSimilarityError out;
    if (X > hat.x_limit()) out.window_ok = false;
    const double h = hat.cell();
    const size_t k_lo = static_cast<size_t>(std::floor(delta / h));
    const size_t k_hi = std::min(hat.u.size(),
                                 static_cast<size_t>(std::ceil(X / h)) + 1);
    const double s = 1.0 / h;
    for (size_t k = k_lo; k < k_hi; ++k) {
        const double lo = std::max(delta, h * static_cast<double>(k));
        const double hi = std::min(X, h * static_cast<double>(k + 1));
        if (hi <= lo) continue;
        const double v = s * hat.u[k];
        const double e = std::max(std::abs(v - rho * profile_G(p, lo)),
                                  std::abs(v - rho * profile_G(p, hi)));
        out.sup_error = std::max(out.sup_error, e);
    }
    return out;
}

DefectReport replacement_defect(const SmoothTestFunction& phi, const ProfileParams& p,
                                double epsilon, double x_support) {
    if (!(epsilon > 0.0 && epsilon <= 1.0))
        throw std::invalid_argument("replacement_defect: need epsilon in (0,1]");
    const double h = std::pow(epsilon, p.alpha);
    const int kk = static_cast<int>(std::ceil(x_support / h)) + 3;

    auto Lphi = [&](double x) {
        const double drift = (p.lambda == 0.0)
                                 ? 0.0
                                 : p.lambda * std::pow(x, p.lambda - 1.0) * phi.df(x);
        return continuum_a(p.lambda, x) * phi.d2f(x) + drift;
    };

    // Hypotheses: |a phi'|(x) <= Lip x near zero, with Lip ~ ||L phi||_inf.
    DefectReport rep;
    double l_inf = 0.0;
    for (int i = 1; i <= 2000; ++i) {
        const double x = x_support * static_cast<double>(i) / 2000.0;
        l_inf = std::max(l_inf, std::abs(Lphi(x)));
    }
    for (double x : {1e-4, 1e-3, 1e-2, 1e-1}) {
        const double v = std::abs(continuum_a(p.lambda, x) * phi.df(x));
        if (v > 10.0 * std::max(l_inf, 1e-12) * x) rep.hypotheses_ok = false;
    }

    // pi_eps phi by per-cell quadrature.
    std::vector<double> proj(static_cast<size_t>(kk));
    for (int k = 1; k <= kk; ++k)
        proj[static_cast<size_t>(k) - 1] =
            integrate(phi.f, h * (k - 1.0), h * static_cast<double>(k), 1e-15, 1e-13).value;

    // eps^{-1} L_lambda pi_eps phi with zero flux through k = 0.
    std::vector<double> l_disc(static_cast<size_t>(kk));
    double flux_prev = 0.0;
    for (int k = 1; k <= kk; ++k) {
        const double flux = (k == kk)
                                ? 0.0
                                : kernel_a(p.lambda, k) * (proj[static_cast<size_t>(k)] - proj[static_cast<size_t>(k) - 1]);
        l_disc[static_cast<size_t>(k) - 1] = (flux - flux_prev) / epsilon;
        flux_prev = flux;
    }

    // pi_eps L phi(k) = [a phi']_{(k-1)h}^{kh}, exact.
    rep.defect.resize(static_cast<size_t>(kk));
    double sup_disc = 0.0;
    for (int k = 1; k <= kk; ++k) {
        const double xr = h * static_cast<double>(k);
        const double xl = h * (k - 1.0);
        const double proj_L = continuum_a(p.lambda, xr) * phi.df(xr) -
                              continuum_a(p.lambda, xl) * phi.df(xl);
        rep.defect[static_cast<size_t>(k) - 1] = l_disc[static_cast<size_t>(k) - 1] - proj_L;
        if (k <= kk - 3) sup_disc = std::max(sup_disc, std::abs(l_disc[static_cast<size_t>(k) - 1]));
    }
    rep.global_constant = sup_disc / (l_inf * std::pow(epsilon, p.alpha));

    for (int k = 3; k <= kk - 3; ++k) {
        auto envelope = [&](double x) {
            return std::pow(x, p.lambda - 1.0) * std::abs(phi.d2f(x)) +
                   std::pow(x, p.lambda) * std::abs(phi.d3f(x));
        };
        const double env =
            std::pow(epsilon, p.alpha) *
            integrate(envelope, h * (k - 2.0), h * (k + 1.0), 1e-15, 1e-10).value;
        if (env <= 1e-300) continue;
        rep.max_normalized =
            std::max(rep.max_normalized, std::abs(rep.defect[static_cast<size_t>(k) - 1]) / env);
    }
    return rep;
}

namespace {

struct LsqFit {
    double slope, intercept, r2, stderr_slope;
};

LsqFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t n = x.size();
    double sx = 0.0, sy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / static_cast<double>(n);
    const double my = sy / static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LsqFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ss_res += r * r;
    }
    fit.r2 = (syy > 0.0) ? 1.0 - ss_res / syy : 1.0;
    fit.stderr_slope =
        (n > 2) ? std::sqrt(ss_res / (static_cast<double>(n) - 2.0) / sxx) : 0.0;
    return fit;
}

FitReport window_fit(const std::vector<double>& t, const std::vector<double>& y,
                     double t_lo, double t_hi, bool log_t) {
    std::vector<double> xs, ys;
    for (size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t_lo || t[i] > t_hi || y[i] <= 0.0) continue;
        xs.push_back(log_t ? std::log(t[i]) : t[i]);
        ys.push_back(std::log(y[i]));
    }
    if (xs.size() < 20)
        throw std::invalid_argument("fit: need >= 20 samples in window");
    if (log_t && t_hi < 9.99 * t_lo)
        throw std::invalid_argument("fit: window must span >= 1 decade");
    // The samples must also cover most of the window (they rarely land
    // exactly on its edges).
    if (log_t && xs.back() - xs.front() < std::log(t_hi / t_lo) * 0.75)
        throw std::invalid_argument("fit: samples must span most of the window");
    const LsqFit fit = least_squares(xs, ys);
    FitReport rep;
    rep.exponent = fit.slope;
    rep.stderr_slope = fit.stderr_slope;
    rep.t_lo = t_lo;
    rep.t_hi = t_hi;
    rep.r2 = fit.r2;
    rep.amplitude = std::exp(fit.intercept);
    return rep;
}

} // namespace

FitReport fit_loglog(const std::vector<double>& t, const std::vector<double>& y,
                     double t_lo, double t_hi) {
    return window_fit(t, y, t_lo, t_hi, true);
}

FitReport fit_semilog(const std::vector<double>& t, const std::vector<double>& y,
                      double t_lo, double t_hi) {
    FitReport rep = window_fit(t, y, t_lo, t_hi, false);
    rep.regime = CoarseningRegime::Exponential;
    return rep;
}

FitReport fit_coarsening_exponent(const std::vector<double>& t,
                                  const std::vector<double>& ell,
                                  CoarseningRegime regime, double t_star) {
    if (t.size() != ell.size() || t.empty())
        throw std::invalid_argument("fit_coarsening_exponent: bad series");
    FitReport rep;
    switch (regime) {
    case CoarseningRegime::Algebraic: {
        const double t_hi = t.back();
        rep = fit_loglog(t, ell, 0.1 * t_hi, t_hi);
        rep.regime = CoarseningRegime::Algebraic;
        return rep;
    }
    case CoarseningRegime::Exponential: {
        const double t_hi = t.back();
        rep = fit_semilog(t, ell, 0.5 * t_hi, t_hi);
        rep.regime = CoarseningRegime::Exponential;
        return rep;
    }
    case CoarseningRegime::Blowup: {
        if (!(t_star > t.back()))
            throw std::invalid_argument("fit_coarsening_exponent: blow-up fit needs t* beyond data");
        std::vector<double> gap(t.size());
        for (size_t i = 0; i < t.size(); ++i) gap[i] = t_star - t[i];
        const double g_min = gap.back();
        rep = fit_loglog(gap, ell, g_min, 10.0 * g_min);
        rep.regime = CoarseningRegime::Blowup;
        return rep;
    }
    }
    throw std::logic_error("fit_coarsening_exponent: unknown regime");
}

FitReport tau_asymptotics(const TimeChangeMap& map, const ProfileParams& p) {
    if (map.t_of_tau.size() < 40)
        throw std::invalid_argument("tau_asymptotics: map too short");
    // Thin the stored map to keep the fit well conditioned.
    std::vector<double> ts, taus;
    const size_t stride = std::max<size_t>(1, map.t_of_tau.size() / 2000);
    for (size_t i = 1; i < map.t_of_tau.size(); i += stride) {
        ts.push_back(map.t_of_tau[i]);
        taus.push_back(map.tau_grid[i]);
    }
    const double t_hi = ts.back();
    if (p.lambda < 1.5) {
        FitReport rep = fit_loglog(ts, taus, 0.1 * t_hi, t_hi);
        rep.regime = CoarseningRegime::Algebraic;
        return rep;
    }
    if (p.lambda == 1.5) {
        FitReport rep = fit_semilog(ts, taus, 0.5 * t_hi, t_hi);
        rep.regime = CoarseningRegime::Exponential;
        return rep;
    }
    if (!map.gel_time_estimate)
        throw std::invalid_argument("tau_asymptotics: blow-up fit needs a gel time estimate");
    const double t_star = *map.gel_time_estimate;
    std::vector<double> gap;
    gap.reserve(ts.size());
    for (double tv : ts) gap.push_back(t_star - tv);
    const double g_min = gap.back();
    FitReport rep = fit_loglog(gap, taus, g_min, 10.0 * g_min);
    rep.regime = CoarseningRegime::Blowup;
    return rep;
}

MomentAsymptotics moment_asymptotics(const HeatTrajectory& dp_traj, double nu,
                                     const ProfileParams& p, double rho) {
    if (!(nu > 0.0)) throw std::invalid_argument("moment_asymptotics: need nu > 0");
    if (dp_traj.times.size() < 2)
        throw std::invalid_argument("moment_asymptotics: need >= 2 snapshots");
    MomentAsymptotics out;
    const size_t last = dp_traj.times.size() - 1;
    const double t_end = dp_traj.times[last];
    auto rescaled = [&](size_t i) {
        return moment(dp_traj.fields[i], nu) *
               std::pow(dp_traj.times[i], p.alpha * (1.0 - nu));
    };
    out.estimate = rescaled(last);
    // Nearest snapshot to one decade earlier.
    size_t j = 0;
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < last; ++i) {
        const double d = std::abs(std::log(dp_traj.times[i] / (0.1 * t_end)));
        if (d < best) {
            best = d;
            j = i;
        }
    }
    out.converged = std::abs(rescaled(j) - out.estimate) < 0.05 * std::abs(out.estimate);
    if (nu <= 1.0) {
        out.target = rho * integrate_to_inf([&](double x) { return std::pow(x, nu) * profile_g(p, x); },
                                            0.0, 1e-14, 1e-10)
                               .value;
    } else {
        out.target = std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

} // namespace edg
