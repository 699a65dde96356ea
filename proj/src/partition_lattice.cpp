#include "qpbe/partition_lattice.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace qpbe {

namespace {

constexpr int kMaxGround = 8;
constexpr int kMaxFubini = 12;

void canonicalize(int m, std::vector<std::vector<int>>& blocks) {
    std::uint32_t seen = 0;
    for (auto& b : blocks) {
        if (b.empty()) throw std::invalid_argument("SetPartition: empty block");
        std::sort(b.begin(), b.end());
        for (int e : b) {
            if (e < 1 || e > m) throw std::invalid_argument("SetPartition: element out of range");
            const std::uint32_t bit = 1u << (e - 1);
            if (seen & bit) throw std::invalid_argument("SetPartition: blocks overlap");
            seen |= bit;
        }
    }
    if (seen != (m >= 32 ? ~0u : (1u << m) - 1u)) {
        throw std::invalid_argument("SetPartition: blocks do not cover the ground set");
    }
    std::sort(blocks.begin(), blocks.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
}

}  // namespace

SetPartition::SetPartition(int m, std::vector<std::vector<int>> raw_blocks)
    : ground_size(m), blocks(std::move(raw_blocks)) {
    if (m < 1 || m > kMaxGround) throw std::range_error("SetPartition: ground size out of range");
    canonicalize(m, blocks);
}

std::vector<SetPartition> enumerate_partitions(int m) {
    if (m < 1 || m > kMaxGround) {
        throw std::range_error("enumerate_partitions: require 1 <= m <= 8");
    }
    std::vector<SetPartition> out;
    std::vector<int> rgs(m, 0);
    for (;;) {
        int num_blocks = *std::max_element(rgs.begin(), rgs.end()) + 1;
        SetPartition p;
        p.ground_size = m;
        p.blocks.assign(num_blocks, {});
        for (int i = 0; i < m; ++i) p.blocks[rgs[i]].push_back(i + 1);
        out.push_back(std::move(p));

        // next restricted-growth string in lexicographic order
        int i = m - 1;
        for (; i > 0; --i) {
            int prefix_max = 0;
            for (int j = 0; j < i; ++j) prefix_max = std::max(prefix_max, rgs[j]);
            if (rgs[i] <= prefix_max) {
                ++rgs[i];
                std::fill(rgs.begin() + i + 1, rgs.end(), 0);
                break;
            }
        }
        if (i == 0) break;
    }
    return out;
}

long long moebius_coefficient(const SetPartition& alpha) {
    const int k = alpha.num_blocks();
    long long f = 1;
    for (int i = 2; i < k; ++i) f *= i;
    return (k % 2 == 1) ? f : -f;
}

SetPartition meet(const SetPartition& a, const SetPartition& b) {
    if (a.ground_size != b.ground_size) {
        throw std::invalid_argument("meet: mismatched ground sizes");
    }
    std::vector<std::vector<int>> blocks;
    for (const auto& ja : a.blocks) {
        const std::uint32_t ma = block_mask(ja);
        for (const auto& jb : b.blocks) {
            const std::uint32_t inter = ma & block_mask(jb);
            if (!inter) continue;
            std::vector<int> blk;
            for (int e = 1; e <= a.ground_size; ++e) {
                if (inter & (1u << (e - 1))) blk.push_back(e);
            }
            blocks.push_back(std::move(blk));
        }
    }
    return SetPartition(a.ground_size, std::move(blocks));
}

bool is_refinement(const SetPartition& a, const SetPartition& b) {
    if (a.ground_size != b.ground_size) {
        throw std::invalid_argument("is_refinement: mismatched ground sizes");
    }
    std::array<std::uint32_t, kMaxGround> owner{};  // element -> mask of its block in b
    for (const auto& blk : b.blocks) {
        const std::uint32_t mb = block_mask(blk);
        for (int e : blk) owner[e - 1] = mb;
    }
    for (const auto& blk : a.blocks) {
        const std::uint32_t ma = block_mask(blk);
        if ((ma & ~owner[blk.front() - 1]) != 0) return false;
    }
    return true;
}

long long weisner_sum(const SetPartition& gamma, const SetPartition& beta) {
    if (gamma.ground_size != beta.ground_size) {
        throw std::invalid_argument("weisner_sum: mismatched ground sizes");
    }
    if (beta.num_blocks() < 2) {
        throw std::invalid_argument("weisner_sum: beta must lie strictly below the top");
    }
    if (!is_refinement(gamma, beta)) {
        throw std::invalid_argument("weisner_sum: gamma must refine beta");
    }
    long long total = 0;
    for (const SetPartition& alpha : enumerate_partitions(beta.ground_size)) {
        if (meet(alpha, beta) == gamma) total += moebius_coefficient(alpha);
    }
    return total;
}

long long stirling_partition_number(int j, int k) {
    if (j < 0 || j > kMaxFubini || k < 0 || k > j) {
        throw std::range_error("stirling_partition_number: out of supported range");
    }
    // S(j,k) = k S(j-1,k) + S(j-1,k-1)
    std::vector<long long> row(j + 1, 0);
    row[0] = 1;
    for (int n = 1; n <= j; ++n) {
        for (int q = n; q >= 1; --q) row[q] = q * row[q] + row[q - 1];
        row[0] = 0;
    }
    return row[k];
}

long long fubini_number(int j) {
    if (j < 0 || j > kMaxFubini) {
        throw std::range_error("fubini_number: require 0 <= j <= 12");
    }
    if (j == 0) return 1;
    long long total = 0;
    long long kfact = 1;
    for (int k = 1; k <= j; ++k) {
        kfact *= k;
        total += stirling_partition_number(j, k) * kfact;
    }
    return total;
}

std::uint32_t block_mask(const std::vector<int>& block) {
    std::uint32_t m = 0;
    for (int e : block) m |= 1u << (e - 1);
    return m;
}

std::string format_partition(const SetPartition& p) {
    std::string s;
    for (std::size_t i = 0; i < p.blocks.size(); ++i) {
        if (i) s.push_back('|');
        for (int e : p.blocks[i]) s.push_back(static_cast<char>('0' + e));
    }
    return s;
}

}  // namespace qpbe
