#include "qpbe/lambda_operator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <stdexcept>

#include "qpbe/numerics.hpp"
#include "qpbe/partition_lattice.hpp"

namespace qpbe {

namespace {

struct FlatPartition {
    long long mu;
    std::vector<std::uint32_t> block_masks;
};

// Partition tables per dimension, flattened to bitmasks for the hot loop.
const std::vector<FlatPartition>& partition_table(int m) {
    static std::vector<FlatPartition> tables[9];
    static std::once_flag built[9];
    std::call_once(built[m], [m] {
        for (const SetPartition& p : enumerate_partitions(m)) {
            FlatPartition fp;
            fp.mu = moebius_coefficient(p);
            for (const auto& blk : p.blocks) fp.block_masks.push_back(block_mask(blk));
            tables[m].push_back(std::move(fp));
        }
    });
    return tables[m];
}

void check_subset(const std::vector<int>& J, const std::vector<int>& K) {
    std::uint32_t mk = 0;
    for (int e : K) {
        if (e < 1 || e > 32) throw std::invalid_argument("index sets hold 1-based indices");
        mk |= 1u << (e - 1);
    }
    for (int e : J) {
        if (e < 1 || e > 32 || !(mk & (1u << (e - 1)))) {
            throw std::invalid_argument("J must be a subset of K");
        }
    }
}

void check_dimension(const CharEvaluator& h, std::span<const double> t) {
    if (h.dimension < 1 || h.dimension > 8) {
        throw std::invalid_argument("lambda operator supports dimensions 1..8");
    }
    if (static_cast<int>(t.size()) != h.dimension) {
        throw std::invalid_argument("argument dimension does not match the evaluator");
    }
}

std::complex<double> kahan_total(const std::vector<std::complex<double>>& terms) {
    KahanSum re, im;
    for (const auto& z : terms) {
        re.add(z.real());
        im.add(z.imag());
    }
    return {re.value(), im.value()};
}

}  // namespace

std::vector<double> project_psi(const std::vector<int>& J, const std::vector<int>& K,
                                std::span<const double> s) {
    check_subset(J, K);
    if (s.size() != K.size()) throw std::invalid_argument("project_psi: |s| must equal |K|");
    std::vector<double> out(s.begin(), s.end());
    for (std::size_t i = 0; i < K.size(); ++i) {
        if (!std::binary_search(J.begin(), J.end(), K[i])) out[i] = 0.0;
    }
    return out;
}

std::vector<double> inject_chi(const std::vector<int>& J, const std::vector<int>& K,
                               std::span<const double> s_J) {
    check_subset(J, K);
    if (s_J.size() != J.size()) throw std::invalid_argument("inject_chi: |s| must equal |J|");
    std::vector<double> out(K.size(), 0.0);
    std::size_t j = 0;
    for (std::size_t i = 0; i < K.size(); ++i) {
        if (j < J.size() && K[i] == J[j]) out[i] = s_J[j++];
    }
    return out;
}

std::complex<double> lambda_apply(const CharEvaluator& h, std::span<const double> t) {
    check_dimension(h, t);
    const int m = h.dimension;
    const auto& table = partition_table(m);

    // h(psi_S(t)) once per nonempty subset S.
    const std::uint32_t full = (1u << m) - 1u;
    std::vector<std::complex<double>> sub(full + 1);
    std::vector<double> buf(m);
    for (std::uint32_t s = 1; s <= full; ++s) {
        for (int i = 0; i < m; ++i) buf[i] = (s & (1u << i)) ? t[i] : 0.0;
        sub[s] = h(buf);
    }

    std::vector<std::complex<double>> terms;
    terms.reserve(table.size());
    for (const FlatPartition& alpha : table) {
        std::complex<double> prod(static_cast<double>(alpha.mu), 0.0);
        for (std::uint32_t mask : alpha.block_masks) prod *= sub[mask];
        terms.push_back(prod);
    }
    return kahan_total(terms);
}

std::complex<double> lambda_apply_reference(const CharEvaluator& h, std::span<const double> t) {
    check_dimension(h, t);
    const int m = h.dimension;
    std::vector<double> buf(m);
    std::vector<std::complex<double>> terms;
    for (const FlatPartition& alpha : partition_table(m)) {
        std::complex<double> prod(static_cast<double>(alpha.mu), 0.0);
        for (std::uint32_t mask : alpha.block_masks) {
            for (int i = 0; i < m; ++i) buf[i] = (mask & (1u << i)) ? t[i] : 0.0;
            prod *= h(buf);
        }
        terms.push_back(prod);
    }
    return kahan_total(terms);
}

std::complex<double> lambda_quotient(const CharEvaluator& h, std::span<const double> t,
                                     double min_coord) {
    check_dimension(h, t);
    double denom = 1.0;
    for (double c : t) {
        if (std::abs(c) < min_coord) {
            throw std::domain_error("lambda_quotient: coordinate below the node-exclusion threshold");
        }
        denom *= c;
    }
    return lambda_apply(h, t) / denom;
}

std::complex<double> gamkrelidze_L(const CharEvaluator& h, std::span<const double> t) {
    if (h.dimension != 2) throw std::invalid_argument("gamkrelidze_L: dimension must be 2");
    if (t.size() != 2) throw std::invalid_argument("gamkrelidze_L: argument must be a 2-vector");
    const double a[2] = {t[0], 0.0};
    const double b[2] = {0.0, t[1]};
    return h(t) - h(std::span<const double>(a, 2)) - h(std::span<const double>(b, 2));
}

}  // namespace qpbe
