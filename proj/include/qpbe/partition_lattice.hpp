#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qpbe {

// Partition of {1,...,m} into disjoint nonempty blocks.
// Canonical form: blocks ordered by their least element, elements ascending.
struct SetPartition {
    int ground_size = 0;
    std::vector<std::vector<int>> blocks;

    SetPartition() = default;
    // Canonicalizes and validates (disjoint, nonempty, covering).
    SetPartition(int m, std::vector<std::vector<int>> raw_blocks);

    int num_blocks() const { return static_cast<int>(blocks.size()); }
    bool operator==(const SetPartition&) const = default;
};

// All partitions of {1,...,m} in restricted-growth-string lexicographic order.
// Requires 1 <= m <= 8.
std::vector<SetPartition> enumerate_partitions(int m);

// (-1)^{|a|-1} (|a|-1)!  -- exact integer.
long long moebius_coefficient(const SetPartition& alpha);

// Blockwise intersections, empty ones dropped. Ground sizes must match.
SetPartition meet(const SetPartition& a, const SetPartition& b);

// a <= b in refinement order: every block of a lies inside a block of b.
bool is_refinement(const SetPartition& a, const SetPartition& b);

// Sum of moebius_coefficient(alpha) over {alpha : alpha meet beta == gamma}.
// Requires gamma <= beta and beta strictly below the one-block partition.
long long weisner_sum(const SetPartition& gamma, const SetPartition& beta);

// Stirling partition number {j over k}, exact for j <= 12.
long long stirling_partition_number(int j, int k);

// Ordered Bell number B_j = sum_k {j over k} k!, with B_0 = 1; j <= 12.
long long fubini_number(int j);

// Bitmask over {1..m}: bit i-1 set iff element i is present.
std::uint32_t block_mask(const std::vector<int>& block);

// Compact rendering, e.g. "12|3" for {{1,2},{3}} (single digits; m <= 8).
std::string format_partition(const SetPartition& p);

}  // namespace qpbe
