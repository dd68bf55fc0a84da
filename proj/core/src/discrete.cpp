#include "edg/discrete.hpp"

#include "edg/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace edg {

namespace {

// Neumaier compensated accumulator.
struct Accum {
    double s = 0.0;
    double c = 0.0;
    void add(double x) {
        const double t = s + x;
        if (std::abs(s) >= std::abs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    double get() const { return s + c; }
};

double cell_weight(double a, double b, double lambda) {
    // int_a^b x^lambda dx, exact.
    return (std::pow(b, lambda + 1.0) - std::pow(a, lambda + 1.0)) / (lambda + 1.0);
}

} // namespace

LatticeField::LatticeField(std::vector<double> values, double lambda_)
    : v(std::move(values)), lambda(lambda_) {
    if (v.size() < 2) throw std::invalid_argument("LatticeField: need N >= 2");
    for (double x : v)
        if (!std::isfinite(x)) throw std::invalid_argument("LatticeField: non-finite entry");
}

double diff_minus(const LatticeField& f, int k, LeftBoundary bc) {
    if (k < 1 || k > f.n()) throw std::out_of_range("diff_minus: index");
    if (k == 1) return bc == LeftBoundary::Zero ? f.at_k(1) : 0.0;
    return f.at_k(k) - f.at_k(k - 1);
}

double diff_plus(const LatticeField& f, int k) {
    if (k < 1 || k > f.n()) throw std::out_of_range("diff_plus: index");
    const double up = (k == f.n()) ? 0.0 : f.at_k(k + 1);
    return up - f.at_k(k);
}

LatticeField apply_L_lambda(const LatticeField& U) {
    const int n = U.n();
    if (n < 3) throw std::invalid_argument("apply_L_lambda: need N >= 3");
    std::vector<double> out(static_cast<size_t>(n));
    double flux_prev = 0.0; // a_lambda del^+ U at k=0 vanishes
    for (int k = 1; k <= n; ++k) {
        const double flux =
            (k == n) ? 0.0 : kernel_a(U.lambda, k) * (U.at_k(k + 1) - U.at_k(k));
        out[static_cast<size_t>(k) - 1] = flux - flux_prev;
        flux_prev = flux;
    }
    return LatticeField(std::move(out), U.lambda);
}

double dirichlet_form(const LatticeField& U, const LatticeField& V) {
    if (U.n() != V.n() || U.lambda != V.lambda)
        throw std::invalid_argument("dirichlet_form: mismatched fields");
    Accum acc;
    for (int k = 1; k < U.n(); ++k)
        acc.add(kernel_a(U.lambda, k) * (U.at_k(k + 1) - U.at_k(k)) *
                (V.at_k(k + 1) - V.at_k(k)));
    return acc.get();
}

double dirichlet_energy(const LatticeField& U) { return dirichlet_form(U, U); }

MomentVector moments(const LatticeField& f, const std::vector<double>& orders) {
    MomentVector mv;
    mv.orders = orders;
    mv.values.reserve(orders.size());
    for (double kappa : orders) {
        Accum acc;
        for (int k = 1; k <= f.n(); ++k) {
            const double x = f.at_k(k);
            if (x == 0.0) continue;
            if (x < 0.0 && kappa != std::floor(kappa))
                throw std::invalid_argument("moments: fractional order needs f >= 0");
            acc.add(std::exp(kappa * std::log(static_cast<double>(k))) * x);
        }
        mv.values.push_back(acc.get());
    }
    return mv;
}

double moment(const LatticeField& f, double order) {
    return moments(f, {order}).values[0];
}

LatticeField tail_transform(const LatticeField& u) {
    std::vector<double> U(u.v.size());
    double run = 0.0;
    for (int k = u.n(); k >= 1; --k) {
        run += u.at_k(k);
        U[static_cast<size_t>(k) - 1] = run;
    }
    return LatticeField(std::move(U), u.lambda);
}

LatticeField tail_inverse(const LatticeField& U) {
    std::vector<double> u(U.v.size());
    for (int k = 1; k <= U.n(); ++k) {
        const double up = (k == U.n()) ? 0.0 : U.at_k(k + 1);
        u[static_cast<size_t>(k) - 1] = U.at_k(k) - up;
    }
    return LatticeField(std::move(u), U.lambda);
}

double nash_functional(const LatticeField& U) {
    Accum l1, l2;
    for (double x : U.v) {
        l1.add(std::abs(x));
        l2.add(x * x);
    }
    if (l1.get() == 0.0) throw std::invalid_argument("nash_functional: zero field");
    const double e = dirichlet_energy(U);
    if (e <= 0.0) return std::numeric_limits<double>::infinity();
    const double lam = U.lambda;
    const double p1 = 2.0 * (2.0 - lam) / (3.0 - lam);
    const double p2 = 1.0 / (3.0 - lam);
    return l2.get() / (std::pow(l1.get(), p1) * std::pow(e, p2));
}

double pl_l1(const PLFunction& f) {
    const double h = f.dx();
    Accum acc;
    for (size_t i = 0; i + 1 < f.v.size(); ++i) {
        const double a = f.v[i];
        const double b = f.v[i + 1];
        if (a * b >= 0.0) {
            acc.add(0.5 * h * (std::abs(a) + std::abs(b)));
        } else {
            // sign change: split the cell at the root
            const double r = a / (a - b);
            acc.add(0.5 * h * (r * std::abs(a) + (1.0 - r) * std::abs(b)));
        }
    }
    return acc.get();
}

double pl_l2sq(const PLFunction& f) {
    const double h = f.dx();
    Accum acc;
    for (size_t i = 0; i + 1 < f.v.size(); ++i) {
        const double a = f.v[i];
        const double b = f.v[i + 1];
        acc.add(h / 3.0 * (a * a + a * b + b * b));
    }
    return acc.get();
}

double pl_dirichlet(const PLFunction& f, const PLFunction& g, double lambda) {
    if (f.v.size() != g.v.size() || f.x_max != g.x_max)
        throw std::invalid_argument("pl_dirichlet: mismatched grids");
    const double h = f.dx();
    Accum acc;
    for (size_t i = 0; i + 1 < f.v.size(); ++i) {
        const double sf = (f.v[i + 1] - f.v[i]) / h;
        const double sg = (g.v[i + 1] - g.v[i]) / h;
        if (sf == 0.0 || sg == 0.0) continue;
        acc.add(sf * sg * cell_weight(h * static_cast<double>(i), h * static_cast<double>(i + 1), lambda));
    }
    return acc.get();
}

double pl_dirichlet_energy(const PLFunction& f, double lambda) {
    return pl_dirichlet(f, f, lambda);
}

PLFunction decreasing_rearrangement(const PLFunction& f) {
    for (double x : f.v)
        if (x < 0.0) throw std::invalid_argument("decreasing_rearrangement: negative input");
    PLFunction out = f;
    std::sort(out.v.begin(), out.v.end(), std::greater<double>());
    return out;
}

double poincare_ratio(const PLFunction& f, double lambda) {
    PLFunction centered = f;
    const double h = f.dx();
    double mass = 0.0;
    for (size_t i = 0; i + 1 < f.v.size(); ++i)
        mass += 0.5 * h * (f.v[i] + f.v[i + 1]);
    const double mean = mass / f.x_max;
    for (double& x : centered.v) x -= mean;
    const double num = pl_l2sq(centered);
    const double den = pl_dirichlet_energy(centered, lambda);
    if (den == 0.0) {
        if (num <= 1e-30) return 0.0;
        throw std::invalid_argument("poincare_ratio: zero-derivative input");
    }
    return num / (std::pow(f.x_max, 2.0 - lambda) * den);
}

PLFunction embed_discrete(const LatticeField& U) {
    PLFunction f;
    f.x_max = static_cast<double>(U.n() + 1);
    f.v.resize(U.v.size() + 2);
    f.v[0] = U.at_k(1);
    for (int k = 1; k <= U.n(); ++k) f.v[static_cast<size_t>(k)] = U.at_k(k);
    f.v[U.v.size() + 1] = 0.0;
    return f;
}

} // namespace edg
