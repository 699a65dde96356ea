// Independent brute-force oracles used by the unit and acceptance suites.
// Everything here recomputes expected values by a route disjoint from the
// library implementation.
#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpbe/models.hpp"

namespace oracles {

// Bell numbers via the recurrence B(n+1) = sum_k C(n,k) B(k).
inline std::vector<long long> bell_numbers(int up_to) {
    std::vector<std::vector<long long>> binom(up_to + 1, std::vector<long long>(up_to + 1, 0));
    for (int n = 0; n <= up_to; ++n) {
        binom[n][0] = 1;
        for (int k = 1; k <= n; ++k) {
            binom[n][k] = binom[n - 1][k - 1] + (k <= n - 1 ? binom[n - 1][k] : 0);
        }
    }
    std::vector<long long> bell(up_to + 1, 0);
    bell[0] = 1;
    for (int n = 0; n < up_to; ++n) {
        long long next = 0;
        for (int k = 0; k <= n; ++k) next += binom[n][k] * bell[k];
        bell[n + 1] = next;
    }
    return bell;
}

// Count partitions of an m-set by direct restricted-growth enumeration.
inline long long count_partitions_brute(int m) {
    std::vector<int> a(m, 0);
    long long count = 0;
    // odometer over restricted growth strings
    for (;;) {
        ++count;
        int i = m - 1;
        for (; i > 0; --i) {
            int prefix_max = 0;
            for (int j = 0; j < i; ++j) prefix_max = std::max(prefix_max, a[j]);
            if (a[i] <= prefix_max) {
                ++a[i];
                std::fill(a.begin() + i + 1, a.end(), 0);
                break;
            }
        }
        if (i == 0) break;
    }
    return count;
}

// --- grammar: exhaustive expansion of derivation trees ------------------------

struct GrammarOracle {
    const qpbe::GrammarSpec& g;
    std::set<std::string> nts;
    std::map<std::string, int> min_len;
    int target_len;
    std::map<std::vector<int>, std::uint64_t> counts;

    explicit GrammarOracle(const qpbe::GrammarSpec& grammar, int n) : g(grammar), target_len(n) {
        for (const auto& r : g.rules) nts.insert(r.lhs);
        // fixpoint for the shortest terminal yield of each nonterminal
        for (const auto& nt : nts) min_len[nt] = 1 << 20;
        for (bool changed = true; changed;) {
            changed = false;
            for (const auto& r : g.rules) {
                int total = 0;
                for (const auto& s : r.rhs) total += nts.count(s) ? min_len[s] : 1;
                if (total < min_len[r.lhs]) {
                    min_len[r.lhs] = total;
                    changed = true;
                }
            }
        }
        std::vector<std::string> form = {g.start};
        expand(form);
    }

    int lower_bound_len(const std::vector<std::string>& form) const {
        int total = 0;
        for (const auto& s : form) total += nts.count(s) ? min_len.at(s) : 1;
        return total;
    }

    void expand(std::vector<std::string>& form) {
        if (lower_bound_len(form) > target_len) return;
        // leftmost nonterminal
        std::size_t pos = 0;
        for (; pos < form.size(); ++pos) {
            if (nts.count(form[pos])) break;
        }
        if (pos == form.size()) {
            if (static_cast<int>(form.size()) != target_len) return;
            std::vector<int> key(g.tracked.size(), 0);
            for (const auto& s : form) {
                for (std::size_t i = 0; i < g.tracked.size(); ++i) {
                    if (s == g.tracked[i]) ++key[i];
                }
            }
            ++counts[key];
            return;
        }
        for (const auto& r : g.rules) {
            if (r.lhs != form[pos]) continue;
            std::vector<std::string> next;
            next.reserve(form.size() + r.rhs.size());
            next.insert(next.end(), form.begin(), form.begin() + pos);
            next.insert(next.end(), r.rhs.begin(), r.rhs.end());
            next.insert(next.end(), form.begin() + pos + 1, form.end());
            expand(next);
        }
    }
};

inline std::map<std::vector<int>, std::uint64_t> grammar_counts_brute(const qpbe::GrammarSpec& g,
                                                                      int n) {
    return GrammarOracle(g, n).counts;
}

// --- dissections: enumeration of non-crossing diagonal subsets ----------------

// Diagonals of the convex n-gon with vertices 1..n.
inline std::vector<std::pair<int, int>> polygon_diagonals(int n) {
    std::vector<std::pair<int, int>> out;
    for (int a = 1; a <= n; ++a) {
        for (int b = a + 2; b <= n; ++b) {
            if (a == 1 && b == n) continue;
            out.push_back({a, b});
        }
    }
    return out;
}

inline bool diagonals_cross(std::pair<int, int> d1, std::pair<int, int> d2) {
    const auto [a, b] = d1;
    const auto [c, d] = d2;
    return (a < c && c < b && b < d) || (c < a && a < d && d < b);
}

// Face sizes of a dissection, by recursive splitting along any diagonal.
inline void face_sizes(const std::vector<int>& verts,
                       const std::vector<std::pair<int, int>>& diags, std::vector<int>& out) {
    for (const auto& [a, b] : diags) {
        std::vector<int> left, right;
        bool inside = false;
        for (int v : verts) {
            if (v == a || v == b) {
                left.push_back(v);
                right.push_back(v);
                inside = (v == a);
            } else if (inside) {
                left.push_back(v);
            } else {
                right.push_back(v);
            }
        }
        if (left.size() < verts.size() && right.size() < verts.size()) {
            std::vector<std::pair<int, int>> dl, dr;
            auto contains = [](const std::vector<int>& vs, int v) {
                return std::find(vs.begin(), vs.end(), v) != vs.end();
            };
            for (const auto& d : diags) {
                if (d == std::make_pair(a, b)) continue;
                if (contains(left, d.first) && contains(left, d.second)) {
                    dl.push_back(d);
                } else {
                    dr.push_back(d);
                }
            }
            face_sizes(left, dl, out);
            face_sizes(right, dr, out);
            return;
        }
    }
    out.push_back(static_cast<int>(verts.size()));
}

// Every subset of pairwise non-crossing diagonals whose faces all belong to an
// allowed class, tallied by class count vector.
inline std::map<std::vector<int>, long long> dissection_counts_brute(
    const qpbe::DissectionSpec& spec, int n) {
    const auto diags = polygon_diagonals(n);
    const int t = static_cast<int>(spec.classes.size());
    std::vector<std::vector<int>> class_sizes(t);
    for (int i = 0; i < t; ++i) class_sizes[i] = spec.class_sizes(i);

    std::map<std::vector<int>, long long> counts;
    std::vector<std::pair<int, int>> chosen;

    std::vector<int> verts(n);
    for (int i = 0; i < n; ++i) verts[i] = i + 1;

    auto classify = [&]() {
        std::vector<int> sizes;
        face_sizes(verts, chosen, sizes);
        std::vector<int> key(t, 0);
        for (int s : sizes) {
            int cls = -1;
            for (int i = 0; i < t; ++i) {
                if (std::find(class_sizes[i].begin(), class_sizes[i].end(), s) !=
                    class_sizes[i].end()) {
                    cls = i;
                    break;
                }
            }
            if (cls < 0) return;  // forbidden face size
            ++key[cls];
        }
        ++counts[key];
    };

    // DFS over diagonals in index order, keeping the chosen set non-crossing
    std::function<void(std::size_t)> rec = [&](std::size_t idx) {
        if (idx == diags.size()) {
            classify();
            return;
        }
        rec(idx + 1);
        for (const auto& d : chosen) {
            if (diagonals_cross(d, diags[idx])) return;
        }
        chosen.push_back(diags[idx]);
        rec(idx + 1);
        chosen.pop_back();
    };
    rec(0);
    return counts;
}

}  // namespace oracles
