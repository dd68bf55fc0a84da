#include "edg/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace edg {

namespace {

// QUADPACK 15-point Kronrod / 7-point Gauss pair on [-1,1].
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

struct PanelEstimate {
    double kronrod;
    double err;
};

PanelEstimate gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double ik = 0.0;
    double ig = 0.0;
    for (int j = 0; j < 8; ++j) {
        const double dx = h * kXgk[j];
        double v;
        if (j == 7) {
            v = f(c);
            ik += kWgk[j] * v;
            ig += kWg[3] * v;
        } else {
            v = f(c - dx) + f(c + dx);
            ik += kWgk[j] * v;
            if (j % 2 == 1) ig += kWg[j / 2] * v;
        }
    }
    ik *= h;
    ig *= h;
    return {ik, std::abs(ik - ig)};
}

void adapt(const std::function<double(double)>& f, double a, double b,
           double abs_tol, double rel_tol, int depth, int max_depth,
           QuadResult& out) {
    const PanelEstimate e = gk15(f, a, b);
    const double local_tol = std::max(abs_tol, rel_tol * std::abs(e.kronrod));
    if (e.err <= local_tol || depth >= max_depth) {
        out.value += e.kronrod;
        out.error_estimate += e.err;
        if (depth >= max_depth && e.err > local_tol) out.converged = false;
        return;
    }
    const double c = 0.5 * (a + b);
    adapt(f, a, c, 0.5 * abs_tol, rel_tol, depth + 1, max_depth, out);
    adapt(f, c, b, 0.5 * abs_tol, rel_tol, depth + 1, max_depth, out);
}

} // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol, double rel_tol, int max_depth) {
    QuadResult out;
    if (a == b) return out;
    adapt(f, a, b, abs_tol, rel_tol, 0, max_depth, out);
    return out;
}

QuadResult integrate_to_inf(const std::function<double(double)>& f, double a,
                            double abs_tol, double rel_tol) {
    auto g = [&f, a](double u) {
        const double om = 1.0 - u;
        const double x = a + u / om;
        return f(x) / (om * om);
    };
    return integrate(g, 0.0, 1.0, abs_tol, rel_tol);
}

} // namespace edg
