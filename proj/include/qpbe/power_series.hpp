#pragma once

#include <map>
#include <vector>

namespace qpbe {

// Truncated multivariate power series: sparse coefficients keyed by exponent
// multi-index, total degree capped at `order`. Coefficients equal to zero are
// dropped.
struct PowerSeries {
    int dimension = 0;
    int order = 0;
    std::map<std::vector<int>, double> coeff;

    PowerSeries() = default;
    PowerSeries(int dimension, int order);

    double at(const std::vector<int>& k) const;
    PowerSeries& set(const std::vector<int>& k, double value);  // validates |k| <= order
    double constant_term() const;
};

PowerSeries series_add(const PowerSeries& a, const PowerSeries& b);
PowerSeries series_scale(const PowerSeries& a, double c);

// Coefficientwise convolution truncated to total degree <= order.
PowerSeries series_product(const PowerSeries& a, const PowerSeries& b);

// Taylor exponential of a series with zero constant term.
PowerSeries series_exp(const PowerSeries& a);

// Taylor logarithm of a series with constant term 1.
PowerSeries series_log(const PowerSeries& a);

// Dense univariate polynomial p(X) = sum_j c[j] X^j.
struct Poly1 {
    std::vector<double> c;

    Poly1() = default;
    explicit Poly1(std::vector<double> coeffs) : c(std::move(coeffs)) {}
    static Poly1 constant(double v) { return Poly1({v}); }

    int degree() const;
    double eval(double x) const;

    Poly1 operator+(const Poly1& o) const;
    Poly1 operator*(const Poly1& o) const;
    Poly1 operator*(double s) const;
};

}  // namespace qpbe
