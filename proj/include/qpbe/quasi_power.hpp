#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "qpbe/char_evaluator.hpp"
#include "qpbe/gaussian.hpp"
#include "qpbe/lattice_distribution.hpp"
#include "qpbe/power_series.hpp"

namespace qpbe {

// Model whose moment generating function behaves like exp(u(s) phi_n + v(s)).
// u and v are normalized to zero constant term at construction. kappa and tau
// are carried as metadata; exact-power models report an infinite kappa.
struct QuasiPowerModel {
    PowerSeries u;
    PowerSeries v;
    std::function<double(long long)> phi;
    std::function<double(long long)> kappa;
    double tau = 1.0;
    std::function<LatticeDistribution(long long)> exact_law;  // may be empty

    QuasiPowerModel() = default;
    QuasiPowerModel(PowerSeries u_, PowerSeries v_, std::function<double(long long)> phi_,
                    std::function<double(long long)> kappa_, double tau_,
                    std::function<LatticeDistribution(long long)> exact_law_);

    int dimension() const { return u.dimension; }
    std::vector<double> grad_u() const;
    std::vector<double> hessian_u() const;  // row-major m x m
    std::vector<double> grad_v() const;
    std::vector<double> hessian_v() const;
};

// Coefficient of s^k in exp(u(s) X + v(s)) as a polynomial in X; its degree is
// at most |k|. Requires |k| within the truncation order of u and v.
Poly1 moment_polynomial(const QuasiPowerModel& model, const std::vector<int>& k);

// (grad u(0) phi_n + grad v(0), H_u(0) phi_n + H_v(0)).
std::pair<std::vector<double>, std::vector<double>> mean_cov(const QuasiPowerModel& model,
                                                             long long n);

// Affine relabeling: atom w maps to (w - center) / scale. Masses untouched.
LatticeDistribution standardize(const LatticeDistribution& d, std::span<const double> center,
                                double scale);

// Exact characteristic function of a finite lattice law as the trigonometric
// sum over its atoms. Coordinates equal to 0.0 are routed through precomputed
// marginal tables so projected evaluations stay cheap.
CharEvaluator lattice_charfn(const LatticeDistribution& d);

struct RateRow {
    long long n = 0;
    double phi = 0.0;
    double sup_distance = 0.0;
};

struct RateResult {
    std::vector<RateRow> rows;
    double fitted_slope = 0.0;  // log sup_distance against log phi_n
};

// Standardizes the exact law at each n by (grad u(0) phi_n, sqrt(phi_n)),
// measures the exact sup-CDF distance to the H_u(0) Gaussian, and fits the
// log-log slope. Requires an exact law, positive definite H_u(0), m <= 3.
RateResult rate_experiment(const QuasiPowerModel& model, const std::vector<long long>& n_list,
                           double tol = 1e-9, bool parallel = true);

// Standardized law and its limit Gaussian for one n.
struct StandardizedPair {
    LatticeDistribution law;
    GaussianSpec gauss;
    double phi = 0.0;
};

StandardizedPair standardized_pair(const QuasiPowerModel& model, long long n);

}  // namespace qpbe
