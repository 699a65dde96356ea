#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace qpbe {

// A characteristic function as a pure map from a real m-vector to a complex
// number. The constructor verifies the value 1 at the origin; Hermitian
// symmetry and |phi| <= 1 are contract obligations of the callable.
struct CharEvaluator {
    int dimension = 0;
    std::function<std::complex<double>(std::span<const double>)> eval;

    CharEvaluator(int dim, std::function<std::complex<double>(std::span<const double>)> f)
        : dimension(dim), eval(std::move(f)) {
        if (dimension < 1) throw std::invalid_argument("CharEvaluator: dimension must be positive");
        if (!eval) throw std::invalid_argument("CharEvaluator: empty evaluator");
        const std::vector<double> origin(dimension, 0.0);
        if (std::abs(eval(origin) - 1.0) > 1e-12) {
            throw std::invalid_argument("CharEvaluator: value at the origin must be 1");
        }
    }

    std::complex<double> operator()(std::span<const double> t) const { return eval(t); }
};

}  // namespace qpbe
