#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace qpbe {

// Finitely supported probability mass on an affine integer grid: atom keys k
// (integer m-tuples) sit at offset + step * k, coordinatewise. Atoms are kept
// lexicographically sorted by key.
struct LatticeDistribution {
    int dimension = 0;
    std::vector<double> offset;
    std::vector<double> step;
    std::vector<int> keys;    // atom_count * dimension, flattened
    std::vector<double> mass; // one entry per atom

    std::size_t atom_count() const { return mass.size(); }
    const int* key(std::size_t atom) const { return keys.data() + atom * dimension; }
    double coord(std::size_t atom, int axis) const {
        return offset[axis] + step[axis] * keys[atom * dimension + axis];
    }

    // Sorts, merges duplicate keys, validates masses (>= 0, total 1 +- 1e-12).
    static LatticeDistribution from_atoms(int dimension, std::vector<double> offset,
                                          std::vector<double> step,
                                          std::vector<std::pair<std::vector<int>, double>> atoms);
};

// Law of the sub-vector indexed by the sorted 1-based axis set J.
LatticeDistribution lattice_marginal(const LatticeDistribution& d, const std::vector<int>& J);

// Law of the sum of independent variables with laws a and b; steps must match.
LatticeDistribution lattice_convolve(const LatticeDistribution& a, const LatticeDistribution& b,
                                     bool parallel = true);

std::vector<double> lattice_mean(const LatticeDistribution& d);
std::vector<double> lattice_cov(const LatticeDistribution& d);  // row-major m x m

// E prod_l X_l^{k_l} for a nonnegative exponent multi-index k.
double lattice_moment(const LatticeDistribution& d, const std::vector<int>& k);

}  // namespace qpbe
