#pragma once

#include <map>
#include <vector>

#include "qpbe/char_evaluator.hpp"
#include "qpbe/gaussian.hpp"
#include "qpbe/lattice_distribution.hpp"

namespace qpbe {

// Tensor Gauss-Legendre settings. Even node counts keep nodes off the
// coordinate hyperplanes; 0 picks the default (64 per axis for m <= 2, 32 for
// m = 3). `parallel` toggles the OpenMP path; results are identical either way.
struct QuadConfig {
    int nodes_per_axis = 0;
    bool parallel = true;

    int resolve(int m) const;
};

// Exact sup_z |F_X(z) - F_Y(z)| up to tol: the lattice CDF is constant on grid
// cells, so per cell the extremes sit at the two corner limits; both are
// compared, including the faces where coordinates run to +infinity (marginal
// comparisons).
double sup_cdf_distance(const LatticeDistribution& x, const GaussianSpec& y, double tol,
                        bool parallel = true);

// (2/(2 pi)^m) int_{[-T,T]^m} |(Lambda(phi_X) - Lambda(phi_Y)) / prod t_l| dt
// by tensor Gauss-Legendre with a fixed reduction order.
double integral_term(const CharEvaluator& phi_x, const CharEvaluator& phi_y, double T,
                     const QuadConfig& quad);

// All terms of the two-sided comparison for one (X, Y, T).
struct BoundReport {
    double T = 0.0;
    double integral_term = 0.0;
    std::map<std::vector<int>, double> marginal_sup;  // proper nonempty subsets J
    double marginal_term_total = 0.0;                 // 2 sum_J B_{m-|J|} sup_J
    double kernel_term = 0.0;                         // 2 (sum_j A_j)(C1 + C2) / T
    double rhs_total = 0.0;
    double lhs_sup_distance = 0.0;
    bool holds = false;
};

// Right-hand side only (lhs fields left at zero).
BoundReport theorem2_rhs(const LatticeDistribution& x, const GaussianSpec& y, double T,
                         const QuadConfig& quad, double tol = 1e-9);

// Full check: lhs from sup_cdf_distance, rhs from theorem2_rhs, holds with
// relative slack 1e-6.
BoundReport verify_bound(const LatticeDistribution& x, const GaussianSpec& y, double T,
                         const QuadConfig& quad, double tol = 1e-9);

// Scale-study quantity: sum over nonempty K of the K-marginal quotient
// integrals plus (sum_j A_j)/T. Carries no pass/fail semantics.
struct CorollaryReport {
    std::map<std::vector<int>, double> integral_by_subset;
    double kernel_part = 0.0;
    double total = 0.0;
};

CorollaryReport corollary_breakdown(const LatticeDistribution& x, const GaussianSpec& y, double T,
                                    const QuadConfig& quad);
// Evaluator-level entry: the derivative bounds still come from y.
CorollaryReport corollary_breakdown(const CharEvaluator& phi_x, const CharEvaluator& phi_y,
                                    const GaussianSpec& y, double T, const QuadConfig& quad);
double corollary_bound(const LatticeDistribution& x, const GaussianSpec& y, double T,
                       const QuadConfig& quad);

}  // namespace qpbe
