#include "edg/profiles.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace edg {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_lambda(double lambda) {
    if (!(lambda >= 0.0 && lambda < 2.0))
        throw std::invalid_argument("lambda must lie in [0,2)");
}
} // namespace

ProfileParams::ProfileParams(double lambda_) : lambda(lambda_) {
    require_lambda(lambda_);
    alpha = 1.0 / (2.0 - lambda);
    beta = (lambda == 1.5) ? kInf : 1.0 / (3.0 - 2.0 * lambda);
    c_bessel = 0.5 * lambda / (2.0 - lambda);
    Z = std::pow(2.0 - lambda, 2.0 * alpha) * std::tgamma(1.0 + alpha);
}

CoarseningRegime coarsening_regime(double lambda) {
    require_lambda(lambda);
    if (lambda < 1.5) return CoarseningRegime::Algebraic;
    if (lambda == 1.5) return CoarseningRegime::Exponential;
    return CoarseningRegime::Blowup;
}

double kernel_a(double lambda, long long k) {
    require_lambda(lambda);
    if (k < 0) throw std::invalid_argument("kernel_a: cluster size must be >= 0");
    if (k == 0) return 0.0;
    if (lambda == 0.0) return 1.0;
    return std::pow(static_cast<double>(k), lambda);
}

double continuum_a(double lambda, double x) {
    require_lambda(lambda);
    if (lambda == 0.0) return 1.0;
    return std::pow(x, lambda);
}

double profile_g(const ProfileParams& p, double x) {
    if (x < 0.0) throw std::invalid_argument("profile_g: need x >= 0");
    if (x == 0.0) {
        if (p.lambda > 1.0) return kInf;
        if (p.lambda == 1.0) return 1.0 / p.Z;
        return 0.0;
    }
    const double w = 2.0 - p.lambda;
    return std::pow(x, 1.0 - p.lambda) / w * std::exp(-std::pow(x, w) / (w * w)) / p.Z;
}

double profile_G(const ProfileParams& p, double x) {
    if (x < 0.0) throw std::invalid_argument("profile_G: need x >= 0");
    return std::exp(-p.alpha * p.alpha * std::pow(x, 2.0 - p.lambda)) / p.Z;
}

double scaling_solution_gamma(const ProfileParams& p, double t, double x) {
    if (t <= 0.0) throw std::invalid_argument("scaling_solution_gamma: need t > 0");
    const double s = std::pow(t, -p.alpha);
    return s * profile_G(p, s * x);
}

double theta_modulus(const ProfileParams& p, double x) {
    if (x <= 0.0) throw std::invalid_argument("theta_modulus: need x > 0");
    if (p.lambda == 1.0) return std::log(x);
    return std::pow(x, 1.0 - p.lambda) / (1.0 - p.lambda);
}

double omega_modulus(const ProfileParams& p, double r) {
    if (r < 1.0) throw std::invalid_argument("omega_modulus: need r >= 1");
    if (p.lambda == 1.0) return std::log(2.0 * r - 1.0);
    const double e = 0.5 * (1.0 - p.alpha);
    return 2.0 / std::abs(1.0 - p.alpha) *
           std::abs(std::pow(r - 0.5, e) - std::pow(0.5, e));
}

} // namespace edg
