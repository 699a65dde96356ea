#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

namespace qpbe {

// Compensated accumulator; fixed-order sums reproduce bit-identically.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double x) {
        double y = x - carry;
        double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

// Recursive Simpson with the classic 15x error heuristic. Deterministic.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth = 48);

// Fixed-step Simpson for long smooth/oscillatory ranges; `intervals` is rounded
// up to the next even count.
double composite_simpson(const std::function<double(double)>& f, double a, double b,
                         std::size_t intervals);

// Nodes (ascending) and weights on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n);

// Least-squares slope of y against x.
double ols_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace qpbe
