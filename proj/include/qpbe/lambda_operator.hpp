#pragma once

#include <complex>
#include <span>
#include <vector>

#include "qpbe/char_evaluator.hpp"

namespace qpbe {

// Coordinate projection: keeps the entries of s indexed by J, zeroes the rest.
// J and K are sorted 1-based index sets with J a subset of K; s has one entry
// per element of K.
std::vector<double> project_psi(const std::vector<int>& J, const std::vector<int>& K,
                                std::span<const double> s);

// Coordinate injection: places the entries of s_J at their positions inside K,
// zero elsewhere.
std::vector<double> inject_chi(const std::vector<int>& J, const std::vector<int>& K,
                               std::span<const double> s_J);

// Signed sum over all partitions alpha of {1..m} of
//   mu_alpha * prod_{J in alpha} h(psi_J(t)).
// h is evaluated once per nonempty subset of coordinates (memoized table).
std::complex<double> lambda_apply(const CharEvaluator& h, std::span<const double> t);

// Same value, no subset table: h evaluated per (partition, block). Kept as the
// reference path for cross-checking the memoized kernel.
std::complex<double> lambda_apply_reference(const CharEvaluator& h, std::span<const double> t);

// lambda_apply(h, t) / prod_l t_l. Every |t_l| must be >= min_coord; quadrature
// callers pass their node-exclusion threshold.
std::complex<double> lambda_quotient(const CharEvaluator& h, std::span<const double> t,
                                     double min_coord = 1e-12);

// Two-dimensional comparison operator: h(t1,t2) - h(t1,0) - h(0,t2).
std::complex<double> gamkrelidze_L(const CharEvaluator& h, std::span<const double> t);

}  // namespace qpbe
