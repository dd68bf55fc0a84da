#include "edg/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace edg {

namespace {

double checked_sum(const std::vector<double>& v, int from, double weight_pow) {
    double s = 0.0;
    for (size_t k = static_cast<size_t>(from); k < v.size(); ++k)
        s += (weight_pow == 0.0 ? 1.0 : std::pow(static_cast<double>(k), weight_pow)) * v[k];
    return s;
}

} // namespace

ClusterState::ClusterState(std::vector<double> c_, double lambda_, double rho_)
    : c(std::move(c_)), lambda(lambda_), rho(rho_) {
    if (c.size() < 4) throw std::invalid_argument("ClusterState: need N >= 3");
    if (!(lambda >= 0.0 && lambda < 2.0))
        throw std::invalid_argument("ClusterState: lambda must lie in [0,2)");
    if (!(rho >= 0.0)) throw std::invalid_argument("ClusterState: rho must be >= 0");
    for (double x : c)
        if (!std::isfinite(x)) throw std::invalid_argument("ClusterState: non-finite entry");
}

double ClusterState::volume() const { return checked_sum(c, 0, 0.0); }
double ClusterState::mass() const { return checked_sum(c, 1, 1.0); }
double ClusterState::m0_living() const { return checked_sum(c, 1, 0.0); }
double ClusterState::m_lambda() const { return checked_sum(c, 1, lambda); }

void ClusterState::validate(double tol) const {
    if (std::abs(volume() - 1.0) > tol)
        throw std::invalid_argument("ClusterState: volume not normalized to 1");
    if (std::abs(mass() - rho) > tol)
        throw std::invalid_argument("ClusterState: mass differs from rho");
    for (double x : c)
        if (x < -tol) throw std::invalid_argument("ClusterState: negative concentration");
}

ClusterState monodisperse_state(double lambda, double rho, int n) {
    if (!(rho > 0.0 && rho <= 1.0))
        throw std::invalid_argument("monodisperse_state: need 0 < rho <= 1");
    std::vector<double> c(static_cast<size_t>(n) + 1, 0.0);
    c[1] = rho;
    c[0] = 1.0 - rho;
    return ClusterState(std::move(c), lambda, rho);
}

ClusterState geometric_state(double lambda, double rho, double q, int n) {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("geometric_state: need q in (0,1)");
    if (!(rho > 0.0 && rho * (1.0 - q) <= 1.0))
        throw std::invalid_argument("geometric_state: need rho (1-q) <= 1");
    // c_k = A q^k for k >= 1 with mass rho: A = rho (1-q)^2 / q.
    const double a = rho * (1.0 - q) * (1.0 - q) / q;
    std::vector<double> c(static_cast<size_t>(n) + 1, 0.0);
    double m0 = 0.0, m1 = 0.0;
    for (int k = 1; k <= n; ++k) {
        c[static_cast<size_t>(k)] = a * std::pow(q, k);
        m0 += c[static_cast<size_t>(k)];
        m1 += k * c[static_cast<size_t>(k)];
    }
    // Fold the truncated geometric tail into the largest slot so the mass is
    // exactly rho, then close the volume with c_0.
    c[static_cast<size_t>(n)] += (rho - m1) / n;
    m0 += (rho - m1) / n;
    c[0] = 1.0 - m0;
    if (c[0] < 0.0) throw std::invalid_argument("geometric_state: rho too large for volume 1");
    return ClusterState(std::move(c), lambda, rho);
}

namespace {

// klam[k] = k^lambda for k = 0..n (true values; klam[0] = 0).
std::vector<double> kernel_table(double lambda, int n) {
    std::vector<double> klam(static_cast<size_t>(n) + 1, 0.0);
    for (int k = 1; k <= n; ++k) klam[static_cast<size_t>(k)] = kernel_a(lambda, k);
    return klam;
}

double m_lambda_cached(const std::vector<double>& c, const std::vector<double>& klam) {
    double m = 0.0;
    for (size_t k = 1; k < c.size(); ++k) m += klam[k] * c[k];
    return m;
}

// Exchange right-hand side with the (N,N+1) edge suppressed in both
// directions, which keeps volume and mass conserved exactly.
void edg_rhs_cached(const std::vector<double>& c, const std::vector<double>& klam,
                    std::vector<double>& out) {
    const int n = static_cast<int>(c.size()) - 1;
    const double m = m_lambda_cached(c, klam);
    auto rate = [&](int k) {
        return (k >= 1 && k < n) ? klam[static_cast<size_t>(k)] * c[static_cast<size_t>(k)] : 0.0;
    };
    out[0] = m * rate(1);
    for (int k = 1; k <= n; ++k)
        out[static_cast<size_t>(k)] = m * (rate(k - 1) - 2.0 * rate(k) + rate(k + 1));
}

} // namespace

std::vector<double> edg_rhs(const ClusterState& s) {
    std::vector<double> out(s.c.size());
    edg_rhs_cached(s.c, kernel_table(s.lambda, s.n()), out);
    return out;
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double kA21 = 1.0 / 5.0;
constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0,
                 kA53 = 64448.0 / 6561.0, kA54 = -212.0 / 729.0;
constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0,
                 kA63 = 46732.0 / 5247.0, kA64 = 49.0 / 176.0,
                 kA65 = -5103.0 / 18656.0;
constexpr double kB1 = 35.0 / 384.0, kB3 = 500.0 / 1113.0, kB4 = 125.0 / 192.0,
                 kB5 = -2187.0 / 6784.0, kB6 = 11.0 / 84.0;
constexpr double kE1 = kB1 - 5179.0 / 57600.0;
constexpr double kE3 = kB3 - 7571.0 / 16695.0;
constexpr double kE4 = kB4 - 393.0 / 640.0;
constexpr double kE5 = kB5 + 92097.0 / 339200.0;
constexpr double kE6 = kB6 - 187.0 / 2100.0;
constexpr double kE7 = -1.0 / 40.0;

struct Dopri {
    std::vector<double> klam;
    std::vector<double> k1, k2, k3, k4, k5, k6, k7, y5, tmp;

    explicit Dopri(const ClusterState& proto)
        : klam(kernel_table(proto.lambda, proto.n())) {
        const size_t m = proto.c.size();
        k1.resize(m);
        k2.resize(m);
        k3.resize(m);
        k4.resize(m);
        k5.resize(m);
        k6.resize(m);
        k7.resize(m);
        y5.resize(m);
        tmp.resize(m);
    }

    void eval(const std::vector<double>& y, std::vector<double>& out) {
        edg_rhs_cached(y, klam, out);
    }

    // Returns the scaled error norm; fills y5 with the 5th-order result.
    double attempt(const std::vector<double>& y, double dt, double atol, double rtol) {
        const size_t m = y.size();
        eval(y, k1);
        for (size_t i = 0; i < m; ++i) tmp[i] = y[i] + dt * kA21 * k1[i];
        eval(tmp, k2);
        for (size_t i = 0; i < m; ++i) tmp[i] = y[i] + dt * (kA31 * k1[i] + kA32 * k2[i]);
        eval(tmp, k3);
        for (size_t i = 0; i < m; ++i)
            tmp[i] = y[i] + dt * (kA41 * k1[i] + kA42 * k2[i] + kA43 * k3[i]);
        eval(tmp, k4);
        for (size_t i = 0; i < m; ++i)
            tmp[i] = y[i] + dt * (kA51 * k1[i] + kA52 * k2[i] + kA53 * k3[i] + kA54 * k4[i]);
        eval(tmp, k5);
        for (size_t i = 0; i < m; ++i)
            tmp[i] = y[i] + dt * (kA61 * k1[i] + kA62 * k2[i] + kA63 * k3[i] +
                                  kA64 * k4[i] + kA65 * k5[i]);
        eval(tmp, k6);
        for (size_t i = 0; i < m; ++i)
            y5[i] = y[i] + dt * (kB1 * k1[i] + kB3 * k3[i] + kB4 * k4[i] +
                                 kB5 * k5[i] + kB6 * k6[i]);
        eval(y5, k7);
        double err = 0.0;
        for (size_t i = 0; i < m; ++i) {
            const double e = dt * (kE1 * k1[i] + kE3 * k3[i] + kE4 * k4[i] +
                                   kE5 * k5[i] + kE6 * k6[i] + kE7 * k7[i]);
            const double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
            err += (e / sc) * (e / sc);
        }
        return std::sqrt(err / static_cast<double>(m));
    }
};

} // namespace

EdgTrajectory solve_edg_direct(const ClusterState& c0, double t_end, double tol,
                               std::vector<double> output_times, double blowup_ceiling) {
    c0.validate(1e-6);
    if (!(t_end > 0.0)) throw std::invalid_argument("solve_edg_direct: need t_end > 0");
    if (!(tol > 0.0)) throw std::invalid_argument("solve_edg_direct: need tol > 0");
    std::sort(output_times.begin(), output_times.end());
    if (output_times.empty() || output_times.back() < t_end) output_times.push_back(t_end);

    EdgTrajectory traj;
    Dopri rk(c0);
    std::vector<double> y = c0.c;
    ClusterState snap = c0;
    const double m_lambda0 = c0.m_lambda();
    const double a_n = kernel_a(c0.lambda, c0.n());

    double t = 0.0;
    double dt = 1e-6;
    size_t next_out = 0;
    const double atol = tol;
    const double rtol = tol;
    const long long max_steps = 100'000'000;
    long long steps = 0;

    while (next_out < output_times.size()) {
        if (++steps > max_steps) throw std::runtime_error("solve_edg_direct: step budget exceeded");
        const double target = output_times[next_out];
        if (t >= target * (1.0 - 1e-15)) {
            snap.c = y;
            traj.times.push_back(target);
            traj.states.push_back(snap);
            ++next_out;
            continue;
        }
        const double step = std::min(dt, target - t);
        const double err = rk.attempt(y, step, atol, rtol);
        if (std::isfinite(err) && err <= 1.0) {
            traj.leak += step * m_lambda_cached(y, rk.klam) * a_n * y[y.size() - 1];
            y = rk.y5;
            t += step;
            if (m_lambda_cached(y, rk.klam) > blowup_ceiling * m_lambda0) {
                traj.halt = HaltReason::Blowup;
                traj.t_stop = t;
                return traj;
            }
        }
        double fac;
        if (!std::isfinite(err))
            fac = 0.2;
        else if (err == 0.0)
            fac = 5.0;
        else
            fac = 0.9 * std::pow(err, -0.2);
        dt = step * std::clamp(fac, 0.2, 5.0);
        if (dt < 1e-14 * std::max(1.0, t)) {
            traj.halt = HaltReason::StepUnderflow;
            traj.t_stop = t;
            return traj;
        }
    }
    traj.halt = HaltReason::ReachedEnd;
    traj.t_stop = t;
    return traj;
}

double TimeChangeMap::t_at(double tau) const {
    auto it = std::lower_bound(tau_grid.begin(), tau_grid.end(), tau);
    if (it == tau_grid.end() || (it == tau_grid.begin() && tau < tau_grid.front()))
        throw std::out_of_range("TimeChangeMap::t_at outside computed range");
    if (it == tau_grid.begin()) return t_of_tau.front();
    const size_t i = static_cast<size_t>(it - tau_grid.begin());
    const double w = (tau - tau_grid[i - 1]) / (tau_grid[i] - tau_grid[i - 1]);
    return t_of_tau[i - 1] + w * (t_of_tau[i] - t_of_tau[i - 1]);
}

double TimeChangeMap::tau_at(double t) const {
    auto it = std::lower_bound(t_of_tau.begin(), t_of_tau.end(), t);
    if (it == t_of_tau.end() || (it == t_of_tau.begin() && t < t_of_tau.front()))
        throw std::out_of_range("TimeChangeMap::tau_at outside computed range");
    if (it == t_of_tau.begin()) return tau_grid.front();
    const size_t i = static_cast<size_t>(it - t_of_tau.begin());
    const double w = (t - t_of_tau[i - 1]) / (t_of_tau[i] - t_of_tau[i - 1]);
    return tau_grid[i - 1] + w * (tau_grid[i] - tau_grid[i - 1]);
}

namespace {

// Crank-Nicolson micro-stepper on the tail field with cached k^lambda table.
struct TailStepper {
    int n;
    double lambda;
    std::vector<double> w;    // edge weights a(k), w[n-1] = 0
    std::vector<double> klam; // k^lambda, index k-1
    std::vector<double> diag, rhs;

    TailStepper(int n_, double lambda_) : n(n_), lambda(lambda_) {
        w.resize(static_cast<size_t>(n), 0.0);
        klam.resize(static_cast<size_t>(n));
        for (int k = 1; k <= n; ++k) {
            klam[static_cast<size_t>(k) - 1] = kernel_a(lambda, k);
            if (k < n) w[static_cast<size_t>(k) - 1] = klam[static_cast<size_t>(k) - 1];
        }
        w[static_cast<size_t>(n) - 1] = 0.0;
        diag.resize(static_cast<size_t>(n));
        rhs.resize(static_cast<size_t>(n));
    }

    void step(std::vector<double>& u, double dt) {
        const double th = 0.5 * dt;
        double flux_prev = 0.0;
        for (int k = 0; k < n; ++k) {
            const double flux = (k == n - 1) ? 0.0
                                             : w[static_cast<size_t>(k)] * (u[static_cast<size_t>(k) + 1] - u[static_cast<size_t>(k)]);
            rhs[static_cast<size_t>(k)] = u[static_cast<size_t>(k)] + th * (flux - flux_prev);
            flux_prev = flux;
        }
        double wl = 0.0;
        for (int k = 0; k < n; ++k) {
            const double wr = (k == n - 1) ? 0.0 : w[static_cast<size_t>(k)];
            diag[static_cast<size_t>(k)] = 1.0 + th * (wl + wr);
            wl = wr;
        }
        for (int k = 1; k < n; ++k) {
            const double off = -th * w[static_cast<size_t>(k) - 1];
            const double m = off / diag[static_cast<size_t>(k) - 1];
            diag[static_cast<size_t>(k)] -= m * off;
            rhs[static_cast<size_t>(k)] -= m * rhs[static_cast<size_t>(k) - 1];
        }
        u[static_cast<size_t>(n) - 1] = rhs[static_cast<size_t>(n) - 1] / diag[static_cast<size_t>(n) - 1];
        for (int k = n - 2; k >= 0; --k) {
            const double off = -th * w[static_cast<size_t>(k)];
            u[static_cast<size_t>(k)] =
                (rhs[static_cast<size_t>(k)] - off * u[static_cast<size_t>(k) + 1]) / diag[static_cast<size_t>(k)];
        }
    }

    // M_lambda of the density u = -del^+ U read off the tail field.
    double m_lambda_of_tail(const std::vector<double>& U) const {
        double s = 0.0;
        for (int k = 0; k < n; ++k) {
            const double up = (k == n - 1) ? 0.0 : U[static_cast<size_t>(k) + 1];
            s += klam[static_cast<size_t>(k)] * (U[static_cast<size_t>(k)] - up);
        }
        return s;
    }
};

} // namespace

TimeChangeResult solve_edg_timechange(const ClusterState& c0, double t_end,
                                      const HeatRunConfig& cfg,
                                      std::vector<double> output_times) {
    c0.validate(1e-6);
    if (c0.n() != cfg.n) throw std::invalid_argument("solve_edg_timechange: c0 size != cfg.n");
    if (c0.lambda != cfg.lambda)
        throw std::invalid_argument("solve_edg_timechange: lambda mismatch");
    std::sort(output_times.begin(), output_times.end());
    if (output_times.empty() || output_times.back() < t_end) output_times.push_back(t_end);

    TimeChangeResult res;
    EdgTrajectory& traj = res.trajectory;
    TimeChangeMap& map = res.map;

    const int n = cfg.n;
    TailStepper st(n, cfg.lambda);

    // Tail field of the density part c_1..c_N.
    std::vector<double> U(static_cast<size_t>(n));
    {
        double run = 0.0;
        for (int k = n; k >= 1; --k) {
            run += c0.c[static_cast<size_t>(k)];
            U[static_cast<size_t>(k) - 1] = run;
        }
    }
    const double rho = c0.rho;
    const bool gel_regime = cfg.lambda > 1.5;
    const ProfileParams prof(cfg.lambda);

    double tau = 0.0, t = 0.0;
    double m_cur = st.m_lambda_of_tail(U);
    double dt = cfg.dt_init;
    size_t next_out = 0;
    map.tau_grid.push_back(0.0);
    map.t_of_tau.push_back(0.0);
    map.m0.push_back(U[0]);
    map.mlambda.push_back(m_cur);

    ClusterState snap = c0;
    auto take_snapshot = [&](double t_label) {
        for (int k = 1; k <= n; ++k) {
            const double up = (k == n) ? 0.0 : U[static_cast<size_t>(k)];
            snap.c[static_cast<size_t>(k)] = U[static_cast<size_t>(k) - 1] - up;
        }
        snap.c[0] = 1.0 - U[0];
        traj.times.push_back(t_label);
        traj.taus.push_back(tau);
        traj.states.push_back(snap);
    };

    std::vector<double> saved;
    const long long max_steps = 40'000'000;
    long long steps = 0;
    while (next_out < output_times.size()) {
        if (++steps > max_steps) throw std::runtime_error("solve_edg_timechange: step budget exceeded");
        const double target = output_times[next_out];
        if (t >= target * (1.0 - 1e-12)) {
            take_snapshot(target);
            ++next_out;
            continue;
        }
        // Truncation watch. In the gelation regime the support reaches k=N in
        // finite time; stop there and extrapolate the gel time. Otherwise the
        // run continues under the reflecting truncation with the flag set.
        if (!res.truncation_contaminated && U[static_cast<size_t>(n) - 1] > 1e-12 * rho) {
            res.truncation_contaminated = true;
            if (gel_regime) {
                const double slope = prof.alpha * (cfg.lambda - 1.0); // > 1
                map.gel_time_estimate = t + tau / (m_cur * (slope - 1.0));
                traj.halt = HaltReason::Blowup;
                traj.t_stop = t;
                return res;
            }
        }

        double dtau = dt;
        saved = U;
        st.step(U, dtau);
        double m_new = st.m_lambda_of_tail(U);
        double dt_phys = 0.5 * dtau * (1.0 / m_cur + 1.0 / m_new);

        if (t + dt_phys > target) {
            // Hit the requested physical time: shrink the tau step by secant
            // iteration on the trapezoid clock.
            double want = target - t;
            for (int it = 0; it < 4 && std::abs(dt_phys - want) > 1e-12 * target; ++it) {
                dtau *= want / dt_phys;
                U = saved;
                st.step(U, dtau);
                m_new = st.m_lambda_of_tail(U);
                dt_phys = 0.5 * dtau * (1.0 / m_cur + 1.0 / m_new);
            }
        }
        traj.leak += dtau * st.klam[static_cast<size_t>(n) - 1] *
                     (saved[static_cast<size_t>(n) - 1]); // a(N) u(N) dtau
        tau += dtau;
        t += dt_phys;
        m_cur = m_new;
        map.tau_grid.push_back(tau);
        map.t_of_tau.push_back(t);
        map.m0.push_back(U[0]);
        map.mlambda.push_back(m_cur);
        dt = std::min(dt * cfg.dt_growth, std::max(cfg.dt_init, cfg.dt_cap_factor * tau));
    }
    if (gel_regime) {
        const double slope = prof.alpha * (cfg.lambda - 1.0);
        map.gel_time_estimate = t + tau / (m_cur * (slope - 1.0));
    }
    traj.halt = HaltReason::ReachedEnd;
    traj.t_stop = t;
    return res;
}

double mean_cluster_size(const ClusterState& s) {
    const double m0 = s.m0_living();
    if (m0 <= 0.0) throw std::invalid_argument("mean_cluster_size: vacuum state");
    return s.rho / m0;
}

double PointMeasure::total() const {
    double s = 0.0;
    for (double v : w) s += v;
    return s;
}

double PointMeasure::first_moment() const {
    double s = 0.0;
    for (size_t i = 0; i < x.size(); ++i) s += x[i] * w[i];
    return s;
}

PointMeasure empirical_measure(const ClusterState& s, double scale) {
    if (!(scale > 0.0)) throw std::invalid_argument("empirical_measure: need scale > 0");
    PointMeasure mu;
    mu.x.reserve(static_cast<size_t>(s.n()));
    mu.w.reserve(static_cast<size_t>(s.n()));
    for (int k = 1; k <= s.n(); ++k) {
        mu.x.push_back(static_cast<double>(k) / scale);
        mu.w.push_back(scale * s.c[static_cast<size_t>(k)]);
    }
    return mu;
}

} // namespace edg
