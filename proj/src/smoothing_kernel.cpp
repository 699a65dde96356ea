#include "qpbe/smoothing_kernel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qpbe/numerics.hpp"

namespace qpbe {

namespace {

constexpr double kPi = std::numbers::pi;

double sinc(double x) {
    if (std::abs(x) < 1e-4) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sin(x) / x;
}

}  // namespace

double density_f_P(double z) {
    const double s = sinc(z / 4.0);
    const double s2 = s * s;
    return 3.0 / (8.0 * kPi) * s2 * s2;
}

double charfn_phi_P(double t) {
    const double u = std::abs(t);
    if (u <= 0.5) return 1.0 - 6.0 * u * u + 6.0 * u * u * u;
    if (u <= 1.0) {
        const double w = 1.0 - u;
        return 2.0 * w * w * w;
    }
    return 0.0;
}

double cdf_P(double x) {
    // F(x) = 1/2 + int_0^x f_P; the symmetric half carries exactly 1/2.
    if (x < 0.0) return 1.0 - cdf_P(-x);
    if (x == 0.0) return 0.5;
    return 0.5 + adaptive_simpson([](double z) { return density_f_P(z); }, 0.0, x, 1e-14);
}

double constant_C1(int m) {
    if (m < 1) throw std::invalid_argument("constant_C1: m must be positive");
    const double q = 1.0 - std::pow(0.75, 1.0 / static_cast<double>(m));
    return std::cbrt(32.0 / (kPi * q));
}

double constant_C2() { return 12.0 / kPi; }

double solve_lambda(int m, double tol) {
    if (m < 1 || m > 8) throw std::range_error("solve_lambda: require 1 <= m <= 8");
    if (tol < 1e-12) throw std::invalid_argument("solve_lambda: tol must be >= 1e-12");
    const double target = std::pow(0.75, 1.0 / static_cast<double>(m));

    double lo = 0.0;
    double hi = constant_C1(m);
    // The tail estimate behind C1 is strict, so cdf_P(C1) > target; widen
    // defensively in case of quadrature slack.
    for (int i = 0; i < 8 && cdf_P(hi) < target; ++i) hi *= 1.5;
    if (cdf_P(hi) < target || cdf_P(lo) > target) {
        throw std::runtime_error("solve_lambda: bracketing failed");
    }

    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        const double v = cdf_P(mid);
        if (std::abs(v - target) <= 0.5 * tol) break;
        if (v < target) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-15) break;
    }
    return mid;
}

double kernel_Q_charfn(std::span<const double> t, double T) {
    if (!(T > 0.0)) throw std::invalid_argument("kernel_Q_charfn: T must be positive");
    double prod = 1.0;
    for (double c : t) prod *= charfn_phi_P(c / T);
    return prod;
}

KernelConstants KernelConstants::make(int m, double T, double tol) {
    if (!(T > 0.0)) throw std::invalid_argument("KernelConstants: T must be positive");
    KernelConstants k;
    k.m = m;
    k.T = T;
    k.C1 = constant_C1(m);
    k.C2 = constant_C2();
    k.lambda = solve_lambda(m, tol);
    if (k.lambda > k.C1) throw std::runtime_error("KernelConstants: quantile exceeded C1");
    return k;
}

}  // namespace qpbe
