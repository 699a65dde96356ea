#pragma once

#include <complex>
#include <span>
#include <vector>

#include "qpbe/char_evaluator.hpp"

namespace qpbe {

// Mean vector plus symmetric covariance matrix (row-major m x m).
struct GaussianSpec {
    std::vector<double> mean;
    std::vector<double> sigma;

    GaussianSpec() = default;
    GaussianSpec(std::vector<double> mean_, std::vector<double> sigma_);

    int dim() const { return static_cast<int>(mean.size()); }
    double cov(int i, int j) const { return sigma[static_cast<std::size_t>(i) * mean.size() + j]; }
    bool is_diagonal() const;
};

// exp(i <mean, t> - t' Sigma t / 2).
std::complex<double> gaussian_charfn(const GaussianSpec& g, std::span<const double> t);

// P(Y <= x) with absolute error <= tol (tol >= 1e-9). m = 1 uses erfc; m = 2, 3
// integrate the outer coordinate's density against the conditional CDF.
// Diagonal covariances short-circuit to the product of one-dimensional CDFs.
double gaussian_cdf(const GaussianSpec& g, std::span<const double> x, double tol);

// The conditioning route without the diagonal shortcut; retained so the two
// routes can be checked against each other.
double gaussian_cdf_conditioning(const GaussianSpec& g, std::span<const double> x, double tol);

// Upper bound on sup_y dF(y)/dy_j: the marginal density peak 1/sqrt(2 pi s_jj).
double derivative_bound_A(const GaussianSpec& g, int j);

// Cholesky test of a row-major symmetric matrix (m <= 3 in practice).
bool is_positive_definite(const std::vector<double>& sigma, int m);

// Sub-vector of the mean and principal submatrix of sigma (J: sorted, 1-based).
GaussianSpec gaussian_marginal(const GaussianSpec& g, const std::vector<int>& J);

CharEvaluator make_gaussian_evaluator(const GaussianSpec& g);

}  // namespace qpbe
