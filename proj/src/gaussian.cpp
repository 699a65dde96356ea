#include "qpbe/gaussian.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qpbe/numerics.hpp"

namespace qpbe {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTailSigmas = 8.5;  // tail mass below 1e-17

double phi_1d(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double pdf_1d(double y, double mu, double var) {
    const double d = y - mu;
    return std::exp(-0.5 * d * d / var) / std::sqrt(2.0 * kPi * var);
}

double cdf_1d(double x, double mu, double var) { return phi_1d((x - mu) / std::sqrt(var)); }

void check_point(const GaussianSpec& g, std::span<const double> x) {
    if (static_cast<int>(x.size()) != g.dim()) {
        throw std::invalid_argument("gaussian_cdf: point dimension mismatch");
    }
}

double positive_diagonal(const GaussianSpec& g, int j) {
    const double s = g.cov(j, j);
    if (!(s > 0.0)) throw std::domain_error("gaussian: nonpositive diagonal covariance entry");
    return s;
}

}  // namespace

GaussianSpec::GaussianSpec(std::vector<double> mean_, std::vector<double> sigma_)
    : mean(std::move(mean_)), sigma(std::move(sigma_)) {
    const std::size_t m = mean.size();
    if (m == 0) throw std::invalid_argument("GaussianSpec: dimension must be positive");
    if (sigma.size() != m * m) throw std::invalid_argument("GaussianSpec: sigma must be m x m");
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            if (std::abs(sigma[i * m + j] - sigma[j * m + i]) > 1e-12) {
                throw std::invalid_argument("GaussianSpec: sigma must be symmetric");
            }
        }
    }
}

bool GaussianSpec::is_diagonal() const {
    const int m = dim();
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            if (i != j && cov(i, j) != 0.0) return false;
        }
    }
    return true;
}

std::complex<double> gaussian_charfn(const GaussianSpec& g, std::span<const double> t) {
    check_point(g, t);
    const int m = g.dim();
    double quad = 0.0, dot = 0.0;
    for (int i = 0; i < m; ++i) {
        dot += g.mean[i] * t[i];
        for (int j = 0; j < m; ++j) quad += t[i] * g.cov(i, j) * t[j];
    }
    return std::exp(std::complex<double>(-0.5 * quad, dot));
}

double gaussian_cdf_conditioning(const GaussianSpec& g, std::span<const double> x, double tol) {
    check_point(g, x);
    const int m = g.dim();
    if (m == 1) return cdf_1d(x[0], g.mean[0], positive_diagonal(g, 0));
    if (m > 3) throw std::invalid_argument("gaussian_cdf: dimensions above 3 are unsupported");

    const double var1 = positive_diagonal(g, 0);
    const double sd1 = std::sqrt(var1);
    const double lo = g.mean[0] - kTailSigmas * sd1;
    const double hi = std::min(x[0], g.mean[0] + kTailSigmas * sd1);
    if (hi <= lo) return 0.0;

    if (m == 2) {
        const double cvar = g.cov(1, 1) - g.cov(1, 0) * g.cov(0, 1) / var1;
        if (!(cvar > 0.0)) throw std::domain_error("gaussian_cdf: singular covariance");
        const double slope = g.cov(1, 0) / var1;
        auto integrand = [&](double y) {
            const double cmean = g.mean[1] + slope * (y - g.mean[0]);
            return pdf_1d(y, g.mean[0], var1) * cdf_1d(x[1], cmean, cvar);
        };
        return adaptive_simpson(integrand, lo, hi, 0.5 * tol);
    }

    // m == 3: condition on the first coordinate, recurse into the 2-d CDF.
    const double s10 = g.cov(1, 0), s20 = g.cov(2, 0);
    std::vector<double> csig = {g.cov(1, 1) - s10 * s10 / var1, g.cov(1, 2) - s10 * s20 / var1,
                                g.cov(2, 1) - s20 * s10 / var1, g.cov(2, 2) - s20 * s20 / var1};
    auto integrand = [&](double y) {
        const double d = (y - g.mean[0]) / var1;
        GaussianSpec cond({g.mean[1] + s10 * d, g.mean[2] + s20 * d}, csig);
        const double inner[2] = {x[1], x[2]};
        return pdf_1d(y, g.mean[0], var1) *
               gaussian_cdf_conditioning(cond, std::span<const double>(inner, 2), 0.1 * tol);
    };
    return adaptive_simpson(integrand, lo, hi, 0.25 * tol);
}

double gaussian_cdf(const GaussianSpec& g, std::span<const double> x, double tol) {
    check_point(g, x);
    if (tol < 1e-9) throw std::invalid_argument("gaussian_cdf: tol must be >= 1e-9");
    const int m = g.dim();
    if (m > 3) throw std::invalid_argument("gaussian_cdf: dimensions above 3 are unsupported");
    if (g.is_diagonal()) {
        double prod = 1.0;
        for (int j = 0; j < m; ++j) prod *= cdf_1d(x[j], g.mean[j], positive_diagonal(g, j));
        return prod;
    }
    const double v = gaussian_cdf_conditioning(g, x, tol);
    return std::min(1.0, std::max(0.0, v));
}

double derivative_bound_A(const GaussianSpec& g, int j) {
    if (j < 1 || j > g.dim()) throw std::invalid_argument("derivative_bound_A: bad coordinate");
    return 1.0 / std::sqrt(2.0 * kPi * positive_diagonal(g, j - 1));
}

bool is_positive_definite(const std::vector<double>& sigma, int m) {
    if (static_cast<int>(sigma.size()) != m * m) {
        throw std::invalid_argument("is_positive_definite: matrix must be m x m");
    }
    std::vector<double> a = sigma;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = a[i * m + j];
            for (int k = 0; k < j; ++k) s -= a[i * m + k] * a[j * m + k];
            if (i == j) {
                if (s <= 1e-12) return false;
                a[i * m + j] = std::sqrt(s);
            } else {
                a[i * m + j] = s / a[j * m + j];
            }
        }
    }
    return true;
}

GaussianSpec gaussian_marginal(const GaussianSpec& g, const std::vector<int>& J) {
    if (J.empty()) throw std::invalid_argument("gaussian_marginal: J must be nonempty");
    const int m = g.dim();
    std::vector<double> mean, sig;
    for (int a : J) {
        if (a < 1 || a > m) throw std::invalid_argument("gaussian_marginal: index out of range");
        mean.push_back(g.mean[a - 1]);
    }
    for (int a : J) {
        for (int b : J) sig.push_back(g.cov(a - 1, b - 1));
    }
    return GaussianSpec(std::move(mean), std::move(sig));
}

CharEvaluator make_gaussian_evaluator(const GaussianSpec& g) {
    GaussianSpec copy = g;
    return CharEvaluator(g.dim(), [copy](std::span<const double> t) {
        return gaussian_charfn(copy, t);
    });
}

}  // namespace qpbe
