#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "qpbe/lattice_distribution.hpp"
#include "qpbe/quasi_power.hpp"

namespace qpbe {

// --- context-free grammar symbol counts -------------------------------------

struct GrammarRule {
    std::string lhs;
    std::vector<std::string> rhs;

    bool operator==(const GrammarRule&) const = default;
};

struct GrammarSpec {
    std::string start;
    std::vector<std::string> tracked;  // terminals whose counts form the coordinates
    std::vector<GrammarRule> rules;    // nonterminals = symbols appearing on a left side

    std::vector<std::string> nonterminals() const;
    std::vector<std::string> terminals() const;
    bool operator==(const GrammarSpec&) const = default;
};

// Plain text, one rule per line: "S -> a S b S"; header lines "start: S" and
// "track: a b". Serialization reproduces the canonical layout byte for byte.
GrammarSpec parse_grammar(const std::string& text);
std::string serialize_grammar(const GrammarSpec& g);

// Number of derivation trees yielding terminal strings of length n, keyed by
// the tracked-symbol count vector. Rules must be free of epsilon productions
// and single-nonterminal replacements so the length recursion terminates.
// Requires n <= 40; counts that overflow 64 bits raise a resource error.
std::map<std::vector<int>, std::uint64_t> grammar_counts(const GrammarSpec& g, int n);

// grammar_counts normalized into a lattice law on the count grid.
LatticeDistribution grammar_law(const GrammarSpec& g, int n);

// --- dissections of labelled convex polygons ---------------------------------

using BigInt = boost::multiprecision::cpp_int;

// Allowed polygon sizes per tracked class. A class is either an explicit list
// of sizes >= 3 or "all remaining" (every size >= 3 not claimed by another
// class). Sizes claimed by no class are forbidden.
struct SizeClass {
    bool all_remaining = false;
    std::vector<int> sizes;
};

struct DissectionSpec {
    std::vector<SizeClass> classes;
    int max_n = 22;

    DissectionSpec(std::vector<SizeClass> classes_, int max_n_);
    std::vector<int> class_sizes(int index) const;  // resolved against max_n
};

// Number of dissections of a convex n-gon with exactly r_i faces in class i,
// computed by iterating the generating-function fixed point with exact integer
// coefficients. Requires 3 <= n <= max_n.
std::map<std::vector<int>, BigInt> dissection_counts(const DissectionSpec& spec, int n);

LatticeDistribution dissection_law(const DissectionSpec& spec, int n);

// --- i.i.d. vector sums -------------------------------------------------------

// Exact law of the n-fold sum of independent copies of step_law, by iterated
// doubling of convolutions.
LatticeDistribution iid_sum_law(const LatticeDistribution& step_law, long long n,
                                bool parallel = true);

// Companion model: u = log of the step MGF expanded to `order`, v = 0,
// phi_n = n, kappa infinite, exact law via iid_sum_law.
QuasiPowerModel make_iid_model(const LatticeDistribution& step_law, int order = 4);

// Standardized law at n plus a Gaussian whose parameters are estimated from
// exact means/covariances at n-1 and n (difference quotients with phi_n = n).
// For models whose u, v are not available in closed form.
StandardizedPair empirical_standardized_pair(
    const std::function<LatticeDistribution(long long)>& law_at, long long n);

// --- degenerate-limit demonstration ------------------------------------------

// Law of a +-1 coin scaled by 1/sqrt(n), together with its exact sup-CDF
// distance from the point-mass-at-zero limit. The distance is 1/2 for every n.
std::pair<LatticeDistribution, double> rademacher_demo(long long n);

}  // namespace qpbe
