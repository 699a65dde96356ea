#include "qpbe/lattice_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>

#include "qpbe/numerics.hpp"

namespace qpbe {

namespace {

void validate_shape(int dimension, const std::vector<double>& offset,
                    const std::vector<double>& step) {
    if (dimension < 1) throw std::invalid_argument("LatticeDistribution: dimension must be positive");
    if (static_cast<int>(offset.size()) != dimension || static_cast<int>(step.size()) != dimension) {
        throw std::invalid_argument("LatticeDistribution: offset/step size mismatch");
    }
    for (double s : step) {
        if (!(s > 0.0)) throw std::invalid_argument("LatticeDistribution: steps must be positive");
    }
}

}  // namespace

LatticeDistribution LatticeDistribution::from_atoms(
    int dimension, std::vector<double> offset, std::vector<double> step,
    std::vector<std::pair<std::vector<int>, double>> atoms) {
    validate_shape(dimension, offset, step);
    std::map<std::vector<int>, double> merged;
    for (auto& [k, p] : atoms) {
        if (static_cast<int>(k.size()) != dimension) {
            throw std::invalid_argument("LatticeDistribution: atom key dimension mismatch");
        }
        if (p < 0.0) throw std::invalid_argument("LatticeDistribution: negative mass");
        merged[k] += p;
    }
    if (merged.empty()) throw std::invalid_argument("LatticeDistribution: no atoms");
    LatticeDistribution d;
    d.dimension = dimension;
    d.offset = std::move(offset);
    d.step = std::move(step);
    KahanSum total;
    for (const auto& [k, p] : merged) {
        d.keys.insert(d.keys.end(), k.begin(), k.end());
        d.mass.push_back(p);
        total.add(p);
    }
    if (std::abs(total.value() - 1.0) > 1e-12) {
        throw std::invalid_argument("LatticeDistribution: total mass must be 1");
    }
    return d;
}

LatticeDistribution lattice_marginal(const LatticeDistribution& d, const std::vector<int>& J) {
    if (J.empty()) throw std::invalid_argument("lattice_marginal: J must be nonempty");
    for (int a : J) {
        if (a < 1 || a > d.dimension) throw std::invalid_argument("lattice_marginal: bad axis");
    }
    const int mj = static_cast<int>(J.size());
    std::map<std::vector<int>, double> merged;
    std::vector<int> sub(mj);
    for (std::size_t atom = 0; atom < d.atom_count(); ++atom) {
        const int* k = d.key(atom);
        for (int i = 0; i < mj; ++i) sub[i] = k[J[i] - 1];
        merged[sub] += d.mass[atom];
    }
    LatticeDistribution out;
    out.dimension = mj;
    for (int a : J) {
        out.offset.push_back(d.offset[a - 1]);
        out.step.push_back(d.step[a - 1]);
    }
    for (const auto& [k, p] : merged) {
        out.keys.insert(out.keys.end(), k.begin(), k.end());
        out.mass.push_back(p);
    }
    return out;
}

LatticeDistribution lattice_convolve(const LatticeDistribution& a, const LatticeDistribution& b,
                                     bool parallel) {
    if (a.dimension != b.dimension) throw std::invalid_argument("lattice_convolve: dimension mismatch");
    const int m = a.dimension;
    for (int i = 0; i < m; ++i) {
        if (a.step[i] != b.step[i]) throw std::invalid_argument("lattice_convolve: steps must match");
    }

    std::vector<int> alo(m), ahi(m), blo(m), bhi(m);
    for (int ax = 0; ax < m; ++ax) {
        alo[ax] = ahi[ax] = a.key(0)[ax];
        blo[ax] = bhi[ax] = b.key(0)[ax];
        for (std::size_t i = 1; i < a.atom_count(); ++i) {
            alo[ax] = std::min(alo[ax], a.key(i)[ax]);
            ahi[ax] = std::max(ahi[ax], a.key(i)[ax]);
        }
        for (std::size_t i = 1; i < b.atom_count(); ++i) {
            blo[ax] = std::min(blo[ax], b.key(i)[ax]);
            bhi[ax] = std::max(bhi[ax], b.key(i)[ax]);
        }
    }

    std::vector<std::int64_t> bext(m), bstride(m);
    std::int64_t bcells = 1;
    for (int ax = m - 1; ax >= 0; --ax) {
        bext[ax] = bhi[ax] - blo[ax] + 1;
        bstride[ax] = bcells;
        bcells *= bext[ax];
    }
    std::vector<std::int64_t> ext(m), stride(m);
    std::int64_t cells = 1;
    for (int ax = m - 1; ax >= 0; --ax) {
        ext[ax] = (ahi[ax] + bhi[ax]) - (alo[ax] + blo[ax]) + 1;
        stride[ax] = cells;
        cells *= ext[ax];
    }
    if (cells > (1ll << 27) || bcells > (1ll << 27)) {
        throw std::length_error("lattice_convolve: result grid too large");
    }

    std::vector<double> bgrid(static_cast<std::size_t>(bcells), 0.0);
    for (std::size_t i = 0; i < b.atom_count(); ++i) {
        std::int64_t idx = 0;
        for (int ax = 0; ax < m; ++ax) idx += (b.key(i)[ax] - blo[ax]) * bstride[ax];
        bgrid[static_cast<std::size_t>(idx)] = b.mass[i];
    }

    // result[k] = sum_i a[i] * b[k - key_a(i)], fixed i order per cell
    std::vector<double> out(static_cast<std::size_t>(cells), 0.0);
    const std::int64_t n_a = static_cast<std::int64_t>(a.atom_count());
#pragma omp parallel for schedule(static) if (parallel)
    for (std::int64_t cell = 0; cell < cells; ++cell) {
        std::vector<int> k(m);
        std::int64_t rem = cell;
        for (int ax = 0; ax < m; ++ax) {
            k[ax] = (alo[ax] + blo[ax]) + static_cast<int>(rem / stride[ax]);
            rem %= stride[ax];
        }
        KahanSum acc;
        for (std::int64_t i = 0; i < n_a; ++i) {
            const int* ka = a.key(static_cast<std::size_t>(i));
            std::int64_t idx = 0;
            bool inside = true;
            for (int ax = 0; ax < m; ++ax) {
                const int kb = k[ax] - ka[ax];
                if (kb < blo[ax] || kb > bhi[ax]) {
                    inside = false;
                    break;
                }
                idx += (kb - blo[ax]) * bstride[ax];
            }
            if (inside) acc.add(a.mass[static_cast<std::size_t>(i)] * bgrid[static_cast<std::size_t>(idx)]);
        }
        out[static_cast<std::size_t>(cell)] = acc.value();
    }

    LatticeDistribution r;
    r.dimension = m;
    r.step = a.step;
    r.offset.resize(m);
    for (int ax = 0; ax < m; ++ax) r.offset[ax] = a.offset[ax] + b.offset[ax];
    for (std::int64_t cell = 0; cell < cells; ++cell) {
        const double p = out[static_cast<std::size_t>(cell)];
        if (p == 0.0) continue;
        std::int64_t rem = cell;
        for (int ax = 0; ax < m; ++ax) {
            r.keys.push_back((alo[ax] + blo[ax]) + static_cast<int>(rem / stride[ax]));
            rem %= stride[ax];
        }
        r.mass.push_back(p);
    }
    return r;
}

std::vector<double> lattice_mean(const LatticeDistribution& d) {
    const int m = d.dimension;
    std::vector<KahanSum> acc(m);
    for (std::size_t atom = 0; atom < d.atom_count(); ++atom) {
        for (int ax = 0; ax < m; ++ax) acc[ax].add(d.mass[atom] * d.coord(atom, ax));
    }
    std::vector<double> out(m);
    for (int ax = 0; ax < m; ++ax) out[ax] = acc[ax].value();
    return out;
}

std::vector<double> lattice_cov(const LatticeDistribution& d) {
    const int m = d.dimension;
    const std::vector<double> mu = lattice_mean(d);
    std::vector<KahanSum> acc(static_cast<std::size_t>(m) * m);
    for (std::size_t atom = 0; atom < d.atom_count(); ++atom) {
        for (int i = 0; i < m; ++i) {
            const double di = d.coord(atom, i) - mu[i];
            for (int j = 0; j < m; ++j) {
                acc[static_cast<std::size_t>(i) * m + j].add(d.mass[atom] * di *
                                                             (d.coord(atom, j) - mu[j]));
            }
        }
    }
    std::vector<double> out(static_cast<std::size_t>(m) * m);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = acc[i].value();
    return out;
}

double lattice_moment(const LatticeDistribution& d, const std::vector<int>& k) {
    if (static_cast<int>(k.size()) != d.dimension) {
        throw std::invalid_argument("lattice_moment: exponent dimension mismatch");
    }
    KahanSum acc;
    for (std::size_t atom = 0; atom < d.atom_count(); ++atom) {
        double term = d.mass[atom];
        for (int ax = 0; ax < d.dimension; ++ax) {
            for (int e = 0; e < k[ax]; ++e) term *= d.coord(atom, ax);
        }
        acc.add(term);
    }
    return acc.value();
}

}  // namespace qpbe
