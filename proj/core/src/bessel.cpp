#include "edg/bessel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace edg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = 3.14159265358979323846;

// Scaled power series: e^{-z} I_nu(z) with all-positive terms, summed with a
// running rescale so intermediate sums cannot overflow for large nu.
double series_scaled(double nu, double z) {
    const double q = 0.25 * z * z;
    double term = 1.0;
    double sum = 1.0;
    double log_rescale = 0.0;
    for (int k = 0; k < 40000; ++k) {
        term *= q / ((k + 1.0) * (nu + k + 1.0));
        sum += term;
        if (term < 1e-18 * sum) break;
        if (sum > 1e280) {
            log_rescale += std::log(1e280);
            sum /= 1e280;
            term /= 1e280;
        }
    }
    const double log_pref = nu * std::log(0.5 * z) - std::lgamma(nu + 1.0) - z;
    return std::exp(log_pref + log_rescale + std::log(sum));
}

// Large-argument compound expansion on the positive real axis,
//   e^{-z} I_nu(z) = [S_I(z) + (cos(nu pi) - sin(nu pi)) e^{-2z} S_K(z)]
//                    / sqrt(2 pi z),
// with S_I, S_K the alternating / one-signed Poincare series. Truncated at
// the smallest term. Adequate for nu <~ 1.8 once z >= 12.
double asymptotic_scaled_small_nu(double nu, double z) {
    const double mu = 4.0 * nu * nu;
    double si = 1.0, sk = 1.0;
    double term = 1.0;
    double prev = kInf;
    for (int k = 0; k < 60; ++k) {
        const double odd = 2.0 * k + 1.0;
        term *= (mu - odd * odd) / (8.0 * z * (k + 1.0));
        if (std::abs(term) >= prev) break;
        prev = std::abs(term);
        si += ((k % 2 == 0) ? -term : term);
        sk += term;
        if (std::abs(term) < 1e-18) break;
    }
    const double recessive = (std::cos(nu * kPi) - std::sin(nu * kPi)) *
                             std::exp(-2.0 * z) * sk;
    return (si + recessive) / std::sqrt(2.0 * kPi * z);
}

// Downward recurrence I_{mu-1} = I_{mu+1} + (2 mu / z) I_mu from a safely
// high starting order, normalized against the fractional base order nu0 in
// [0,1) whose value comes from the large-argument expansion.
double recurrence_scaled(double nu, double z) {
    const int steps = static_cast<int>(std::floor(nu));
    const double nu0 = nu - steps;
    const int start = steps + 20 +
                      static_cast<int>(std::ceil(std::sqrt(80.0 * z)));
    std::vector<double> p(static_cast<size_t>(start) + 2, 0.0);
    p[static_cast<size_t>(start) + 1] = 0.0;
    p[static_cast<size_t>(start)] = 1e-280;
    for (int j = start; j >= 1; --j) {
        p[static_cast<size_t>(j) - 1] =
            p[static_cast<size_t>(j) + 1] + (2.0 * (nu0 + j) / z) * p[static_cast<size_t>(j)];
        if (p[static_cast<size_t>(j) - 1] > 1e280) {
            for (int m = j - 1; m <= start + 1; ++m) p[static_cast<size_t>(m)] *= 1e-280;
        }
    }
    const double base = asymptotic_scaled_small_nu(nu0, z);
    return p[static_cast<size_t>(steps)] * (base / p[0]);
}

} // namespace

double bessel_series_cutoff(double nu) { return std::max(12.0, 2.0 * nu); }

double bessel_i_scaled(double nu, double z) {
    if (nu < -0.5) throw std::invalid_argument("bessel_i: order must be >= -1/2");
    if (z < 0.0) throw std::invalid_argument("bessel_i: argument must be >= 0");
    if (z == 0.0) {
        if (nu == 0.0) return 1.0;
        return nu > 0.0 ? 0.0 : kInf;
    }
    if (z <= bessel_series_cutoff(nu)) return series_scaled(nu, z);
    if (nu <= 1.8) return asymptotic_scaled_small_nu(nu, z);
    return recurrence_scaled(nu, z);
}

BesselEval bessel_i(double nu, double z) {
    BesselEval ev;
    ev.nu = nu;
    ev.z = z;
    ev.scaled = bessel_i_scaled(nu, z);
    const double log_value = std::log(ev.scaled) + z;
    ev.value = (log_value > 709.0) ? kInf : ev.scaled * std::exp(z);
    return ev;
}

double h_function(double c, double z) {
    if (c <= -0.5) throw std::invalid_argument("h_function: need c > -1/2");
    const double nu = c - 0.5;
    if (z <= bessel_series_cutoff(std::max(nu, 0.0))) {
        // Series in z^2, no cancellation near z = 0.
        const double q = 0.25 * z * z;
        double term = 1.0;
        double sum = 1.0;
        for (int k = 0; k < 40000; ++k) {
            term *= q / ((k + 1.0) * (nu + k + 1.0));
            sum += term;
            if (term < 1e-18 * sum) break;
        }
        return std::exp(-nu * std::log(2.0) - std::lgamma(nu + 1.0)) * sum;
    }
    const double lg = log_h_scaled(c, z) + z;
    return lg > 709.0 ? kInf : std::exp(lg);
}

double log_h_scaled(double c, double z) {
    if (c <= -0.5) throw std::invalid_argument("log_h_scaled: need c > -1/2");
    const double nu = c - 0.5;
    if (z == 0.0) return -nu * std::log(2.0) - std::lgamma(nu + 1.0);
    if (z <= bessel_series_cutoff(std::max(nu, 0.0))) {
        const double q = 0.25 * z * z;
        double term = 1.0;
        double sum = 1.0;
        for (int k = 0; k < 40000; ++k) {
            term *= q / ((k + 1.0) * (nu + k + 1.0));
            sum += term;
            if (term < 1e-18 * sum) break;
        }
        return -nu * std::log(2.0) - std::lgamma(nu + 1.0) + std::log(sum) - z;
    }
    return std::log(bessel_i_scaled(nu, z)) - nu * std::log(z);
}

std::vector<double> heat_phi_row(double t, int kmax) {
    if (t <= 0.0) throw std::invalid_argument("heat_phi_row: need t > 0");
    if (kmax < 0) throw std::invalid_argument("heat_phi_row: need kmax >= 0");
    const double z = 2.0 * t;
    const int start = std::max(kmax, static_cast<int>(std::ceil(std::sqrt(80.0 * z)))) + 20;
    std::vector<double> p(static_cast<size_t>(start) + 2, 0.0);
    p[static_cast<size_t>(start) + 1] = 0.0;
    p[static_cast<size_t>(start)] = 1e-280;
    for (int m = start; m >= 1; --m) {
        p[static_cast<size_t>(m) - 1] =
            p[static_cast<size_t>(m) + 1] + (2.0 * m / z) * p[static_cast<size_t>(m)];
        if (p[static_cast<size_t>(m) - 1] > 1e280) {
            for (int j = m - 1; j <= start + 1; ++j) p[static_cast<size_t>(j)] *= 1e-280;
        }
    }
    // sum_{k in Z} I_k(z) = e^z, so the scaled row sums to one.
    double norm = p[0];
    for (int m = 1; m <= start; ++m) norm += 2.0 * p[static_cast<size_t>(m)];
    std::vector<double> row(static_cast<size_t>(kmax) + 1);
    for (int m = 0; m <= kmax; ++m) row[static_cast<size_t>(m)] = p[static_cast<size_t>(m)] / norm;
    return row;
}

double heat_phi(double t, double x) {
    if (t <= 0.0) throw std::invalid_argument("heat_phi: need t > 0");
    return bessel_i_scaled(std::abs(x), 2.0 * t);
}

double heat_psi(double t, int k, int l) {
    if (l < 1) throw std::invalid_argument("heat_psi: need l >= 1");
    return heat_phi(t, std::abs(k - l)) - heat_phi(t, k + l);
}

double heat_psi_real(double t, double x, int l) {
    if (l < 1) throw std::invalid_argument("heat_psi_real: need l >= 1");
    if (x < l - 1) throw std::invalid_argument("heat_psi_real: need x >= l-1");
    double sum = 0.0;
    for (int m = 1; m <= l; ++m) {
        const double y = x - l + 2.0 * m - 1.0;
        sum += y * heat_phi(t, y);
    }
    return sum / t;
}

} // namespace edg
