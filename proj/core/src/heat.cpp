#include "edg/heat.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace edg {

namespace {

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Tridiagonal stepper state for U' = L U on {1..n} with zero-flux ends.
// Edge weights w[k] = a_lambda(k) couple k and k+1 for k = 1..n-1.
struct Stepper {
    int n;
    double lambda;
    std::vector<double> w;     // size n, w[n-1] == 0 (reflecting truncation)
    std::vector<double> diag;  // scratch for the Thomas solve
    std::vector<double> rhs;

    explicit Stepper(int n_, double lambda_) : n(n_), lambda(lambda_) {
        w.resize(static_cast<size_t>(n), 0.0);
        for (int k = 1; k < n; ++k) w[static_cast<size_t>(k) - 1] = kernel_a(lambda, k);
        w[static_cast<size_t>(n) - 1] = 0.0;
        diag.resize(static_cast<size_t>(n));
        rhs.resize(static_cast<size_t>(n));
    }

    void apply_L(const std::vector<double>& u, std::vector<double>& out) const {
        double flux_prev = 0.0;
        for (int k = 0; k < n; ++k) {
            const double flux =
                (k == n - 1) ? 0.0 : w[static_cast<size_t>(k)] * (u[static_cast<size_t>(k) + 1] - u[static_cast<size_t>(k)]);
            out[static_cast<size_t>(k)] = flux - flux_prev;
            flux_prev = flux;
        }
    }

    // One Crank-Nicolson step: (I - dt/2 L) U1 = (I + dt/2 L) U0.
    void cn_step(std::vector<double>& u, double dt) {
        const double th = 0.5 * dt;
        // rhs = (I + th L) u
        double flux_prev = 0.0;
        for (int k = 0; k < n; ++k) {
            const double flux = (k == n - 1) ? 0.0
                                             : w[static_cast<size_t>(k)] * (u[static_cast<size_t>(k) + 1] - u[static_cast<size_t>(k)]);
            rhs[static_cast<size_t>(k)] = u[static_cast<size_t>(k)] + th * (flux - flux_prev);
            flux_prev = flux;
        }
        // Thomas solve on the symmetric tridiagonal (I - th L):
        //   diag_k = 1 + th (w_{k-1} + w_k), off_k = -th w_k.
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

    void rk4_step(std::vector<double>& u, double dt, std::vector<double>& k1,
                  std::vector<double>& k2, std::vector<double>& k3,
                  std::vector<double>& k4, std::vector<double>& tmp) const {
        const size_t m = u.size();
        apply_L(u, k1);
        for (size_t i = 0; i < m; ++i) tmp[i] = u[i] + 0.5 * dt * k1[i];
        apply_L(tmp, k2);
        for (size_t i = 0; i < m; ++i) tmp[i] = u[i] + 0.5 * dt * k2[i];
        apply_L(tmp, k3);
        for (size_t i = 0; i < m; ++i) tmp[i] = u[i] + dt * k3[i];
        apply_L(tmp, k4);
        for (size_t i = 0; i < m; ++i)
            u[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
};

bool shape_ok(const std::vector<double>& u, double scale) {
    const double tol = 1e-13 * std::max(scale, 1e-300);
    for (size_t i = 0; i < u.size(); ++i) {
        if (u[i] < -tol) return false;
        if (i + 1 < u.size() && u[i + 1] > u[i] + tol) return false;
    }
    return true;
}

bool is_tail_shaped(const std::vector<double>& u) {
    for (size_t i = 0; i < u.size(); ++i) {
        if (u[i] < 0.0) return false;
        if (i + 1 < u.size() && u[i + 1] > u[i]) return false;
    }
    return true;
}

} // namespace

void HeatRunConfig::validate() const {
    if (!(lambda >= 0.0 && lambda < 2.0))
        throw std::invalid_argument("HeatRunConfig: lambda must lie in [0,2)");
    if (n < 3) throw std::invalid_argument("HeatRunConfig: n must be >= 3");
    if (!(t_end > 0.0)) throw std::invalid_argument("HeatRunConfig: t_end must be > 0");
    if (!(dt_init > 0.0) || dt_init > 1.0)
        throw std::invalid_argument("HeatRunConfig: dt_init must lie in (0,1]");
    if (scheme == HeatScheme::ExplicitRk4 &&
        dt_init > 0.4 * std::pow(static_cast<double>(n), -lambda))
        throw std::invalid_argument("HeatRunConfig: explicit scheme needs dt_init <= 0.4 N^-lambda");
    for (double t : output_times)
        if (!(t > 0.0) || t > t_end)
            throw std::invalid_argument("HeatRunConfig: output_times must lie in (0, t_end]");
    if (!std::is_sorted(output_times.begin(), output_times.end()))
        throw std::invalid_argument("HeatRunConfig: output_times must be sorted");
}

HeatTrajectory solve_np(const LatticeField& U0, const HeatRunConfig& cfg) {
    cfg.validate();
    if (U0.n() != cfg.n) throw std::invalid_argument("solve_np: field size != cfg.n");
    if (U0.lambda != cfg.lambda) throw std::invalid_argument("solve_np: field lambda != cfg.lambda");

    std::vector<double> outs = cfg.output_times;
    if (outs.empty() || outs.back() < cfg.t_end) outs.push_back(cfg.t_end);

    HeatTrajectory traj;
    traj.lambda = cfg.lambda;
    traj.n = cfg.n;

    Stepper st(cfg.n, cfg.lambda);
    std::vector<double> u = U0.v;
    const bool guard = cfg.enforce_shape && is_tail_shaped(u);
    double u0_l1 = 0.0;
    for (double x : u) u0_l1 += std::abs(x);

    std::vector<double> k1, k2, k3, k4, tmp;
    if (cfg.scheme == HeatScheme::ExplicitRk4) {
        k1.resize(u.size());
        k2.resize(u.size());
        k3.resize(u.size());
        k4.resize(u.size());
        tmp.resize(u.size());
    }

    double t = 0.0;
    double dt = cfg.dt_init;
    size_t next_out = 0;
    std::vector<double> saved;
    while (next_out < outs.size()) {
        const double target = outs[next_out];
        if (t >= target * (1.0 - 1e-15)) {
            LatticeField f(u, cfg.lambda);
            double m = 0.0;
            for (double x : u) m += x;
            traj.times.push_back(target);
            traj.fields.push_back(std::move(f));
            traj.mass.push_back(m);
            if (std::abs(u.back()) > 1e-12 * std::max(u0_l1, 1e-300))
                traj.truncation_contaminated = true;
            ++next_out;
            continue;
        }

        double step = std::min(dt, target - t);
        if (cfg.scheme == HeatScheme::ExplicitRk4) step = std::min(step, cfg.dt_init);

        if (cfg.scheme == HeatScheme::CrankNicolson) {
            saved = u;
            int halvings = 0;
            for (;;) {
                st.cn_step(u, step);
                if (!guard || shape_ok(u, u0_l1)) break;
                if (++halvings > 40) throw NumericalError("solve_np: shape guard failed to converge");
                u = saved;
                step *= 0.5;
            }
        } else {
            st.rk4_step(u, step, k1, k2, k3, k4, tmp);
        }
        t += step;
        ++traj.steps;
        if (!std::isfinite(u[0]) || !std::isfinite(u[u.size() / 2]))
            throw NumericalError("solve_np: non-finite state");

        dt = std::min(dt * cfg.dt_growth, std::max(cfg.dt_init, cfg.dt_cap_factor * t));
    }
    return traj;
}

HeatTrajectory solve_dp(const LatticeField& u0, const HeatRunConfig& cfg) {
    for (double x : u0.v)
        if (x < 0.0) throw std::invalid_argument("solve_dp: density must be nonnegative");
    HeatRunConfig c = cfg;
    c.enforce_shape = true;
    HeatTrajectory traj = solve_np(tail_transform(u0), c);
    for (size_t i = 0; i < traj.fields.size(); ++i) {
        traj.fields[i] = tail_inverse(traj.fields[i]);
        double m1 = 0.0;
        for (int k = 1; k <= traj.fields[i].n(); ++k)
            m1 += static_cast<double>(k) * traj.fields[i].at_k(k);
        traj.mass[i] = m1;
    }
    return traj;
}

FundamentalSolutionTable fundamental_solution(int l, const HeatRunConfig& cfg) {
    if (l < 1 || l > cfg.n / 2)
        throw std::invalid_argument("fundamental_solution: need 1 <= l <= n/2");
    std::vector<double> u0(static_cast<size_t>(cfg.n), 0.0);
    u0[static_cast<size_t>(l) - 1] = 1.0;
    HeatRunConfig c = cfg;
    c.enforce_shape = false;
    HeatTrajectory traj = solve_np(LatticeField(u0, cfg.lambda), c);
    FundamentalSolutionTable table;
    table.source = l;
    table.times = traj.times;
    table.fields = std::move(traj.fields);
    return table;
}

DecayReport decay_report(const HeatTrajectory& traj, double ratio_limit) {
    DecayReport rep;
    const ProfileParams p(traj.lambda);
    double lo_s = 1e300, hi_s = 0.0, lo_2 = 1e300, hi_2 = 0.0, lo_e = 1e300, hi_e = 0.0;
    for (size_t i = 0; i < traj.times.size(); ++i) {
        const double t = traj.times[i];
        const LatticeField& U = traj.fields[i];
        double sup = 0.0, l2 = 0.0;
        for (double x : U.v) {
            sup = std::max(sup, std::abs(x));
            l2 += x * x;
        }
        DecayRow row;
        row.t = t;
        row.sup_scaled = sup * std::pow(1.0 + t, p.alpha);
        row.l2sq_scaled = l2 * std::pow(1.0 + t, p.alpha);
        row.energy_scaled = dirichlet_energy(U) * std::pow(t, p.alpha + 1.0);
        rep.rows.push_back(row);
        if (t >= 1.0) {
            lo_s = std::min(lo_s, row.sup_scaled);
            hi_s = std::max(hi_s, row.sup_scaled);
            lo_2 = std::min(lo_2, row.l2sq_scaled);
            hi_2 = std::max(hi_2, row.l2sq_scaled);
            lo_e = std::min(lo_e, row.energy_scaled);
            hi_e = std::max(hi_e, row.energy_scaled);
        }
    }
    if (hi_s > 0.0) {
        rep.ratio_sup = hi_s / lo_s;
        rep.ratio_l2 = hi_2 / lo_2;
        rep.ratio_energy = hi_e / lo_e;
        rep.flagged = rep.ratio_sup > ratio_limit || rep.ratio_l2 > ratio_limit ||
                      rep.ratio_energy > ratio_limit;
    }
    return rep;
}

ContinuityReport continuity_report(const HeatTrajectory& traj, double u0_l1,
                                   const std::vector<SpacePair>& space_pairs,
                                   const std::vector<TimePair>& time_pairs) {
    const ProfileParams p(traj.lambda);
    auto field_at = [&traj](double t) -> const LatticeField& {
        for (size_t i = 0; i < traj.times.size(); ++i)
            if (std::abs(traj.times[i] - t) <= 1e-12 * std::max(1.0, t)) return traj.fields[i];
        throw std::invalid_argument("continuity_report: time not in trajectory");
    };
    ContinuityReport rep;
    for (const SpacePair& sp : space_pairs) {
        const LatticeField& U = field_at(sp.t);
        const double num = std::abs(U.at_k(sp.k2) - U.at_k(sp.k1));
        double mod = 0.0;
        if (sp.k1 != sp.k2) {
            const double s = std::pow(sp.t, -p.alpha);
            const double env = u0_l1 * s *
                               std::sqrt(std::abs(theta_modulus(p, s * sp.k2) -
                                                  theta_modulus(p, s * sp.k1)));
            mod = (env == 0.0) ? 0.0 : num / env;
        }
        rep.space_moduli.push_back(mod);
        rep.max_space = std::max(rep.max_space, mod);
    }
    for (const TimePair& tp : time_pairs) {
        if (!(tp.s <= tp.t)) throw std::invalid_argument("continuity_report: need s <= t");
        const double num = std::abs(field_at(tp.t).at_k(tp.k) - field_at(tp.s).at_k(tp.k));
        double mod = 0.0;
        if (tp.s != tp.t) {
            const double env = u0_l1 * std::pow(tp.s, -p.alpha) * omega_modulus(p, tp.t / tp.s);
            mod = (env == 0.0) ? 0.0 : num / env;
        }
        rep.time_moduli.push_back(mod);
        rep.max_time = std::max(rep.max_time, mod);
    }
    return rep;
}

MomentBoundReport moment_bound_report(const HeatTrajectory& traj, double mu,
                                      double ratio_limit) {
    if (mu <= 0.0) throw std::invalid_argument("moment_bound_report: need mu > 0");
    const ProfileParams p(traj.lambda);
    MomentBoundReport rep;
    double lo = 1e300, hi = 0.0;
    for (size_t i = 0; i < traj.times.size(); ++i) {
        const double t = traj.times[i];
        const double m = moment(traj.fields[i], mu);
        const double r = m * std::pow(t, p.alpha * (1.0 - mu));
        rep.t.push_back(t);
        rep.rescaled.push_back(r);
        if (t >= 1.0) {
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
    }
    if (hi > 0.0 && hi / lo > ratio_limit) rep.bounded = false;
    return rep;
}

} // namespace edg
