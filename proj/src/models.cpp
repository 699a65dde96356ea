#include "qpbe/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "qpbe/numerics.hpp"
#include "qpbe/power_series.hpp"

namespace qpbe {

namespace {

constexpr int kGrammarMaxLength = 40;

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r;
    if (__builtin_add_overflow(a, b, &r)) {
        throw std::length_error("grammar_counts: derivation count exceeds 64 bits");
    }
    return r;
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r;
    if (__builtin_mul_overflow(a, b, &r)) {
        throw std::length_error("grammar_counts: derivation count exceeds 64 bits");
    }
    return r;
}

std::vector<std::string> split_ws(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

}  // namespace

std::vector<std::string> GrammarSpec::nonterminals() const {
    std::set<std::string> nt;
    for (const auto& r : rules) nt.insert(r.lhs);
    return {nt.begin(), nt.end()};
}

std::vector<std::string> GrammarSpec::terminals() const {
    std::set<std::string> nt;
    for (const auto& r : rules) nt.insert(r.lhs);
    std::set<std::string> t;
    for (const auto& r : rules) {
        for (const auto& s : r.rhs) {
            if (!nt.count(s)) t.insert(s);
        }
    }
    return {t.begin(), t.end()};
}

GrammarSpec parse_grammar(const std::string& text) {
    GrammarSpec g;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (line.rfind("start:", 0) == 0) {
            const auto toks = split_ws(line.substr(6));
            if (toks.size() != 1) throw std::invalid_argument("grammar: malformed start line");
            g.start = toks[0];
            continue;
        }
        if (line.rfind("track:", 0) == 0) {
            g.tracked = split_ws(line.substr(6));
            continue;
        }
        const auto toks = split_ws(line);
        if (toks.size() < 3 || toks[1] != "->") {
            throw std::invalid_argument("grammar: malformed rule line: " + line);
        }
        GrammarRule r;
        r.lhs = toks[0];
        r.rhs.assign(toks.begin() + 2, toks.end());
        g.rules.push_back(std::move(r));
    }
    if (g.start.empty()) throw std::invalid_argument("grammar: missing start line");
    if (g.rules.empty()) throw std::invalid_argument("grammar: no rules");

    std::set<std::string> nts;
    for (const auto& r : g.rules) nts.insert(r.lhs);
    if (!nts.count(g.start)) throw std::invalid_argument("grammar: start symbol has no rules");
    std::set<std::string> tracked_seen;
    for (const auto& t : g.tracked) {
        if (nts.count(t)) throw std::invalid_argument("grammar: tracked symbol is a nonterminal");
        if (!tracked_seen.insert(t).second) {
            throw std::invalid_argument("grammar: tracked symbols must be distinct");
        }
    }
    return g;
}

std::string serialize_grammar(const GrammarSpec& g) {
    std::ostringstream out;
    out << "start: " << g.start << "\n";
    out << "track:";
    for (const auto& t : g.tracked) out << " " << t;
    out << "\n";
    for (const auto& r : g.rules) {
        out << r.lhs << " ->";
        for (const auto& s : r.rhs) out << " " << s;
        out << "\n";
    }
    return out.str();
}

namespace {

// table[nt][length] : count-vector -> derivation count
using CountMap = std::map<std::vector<int>, std::uint64_t>;

void validate_grammar_for_dp(const GrammarSpec& g, const std::set<std::string>& nts) {
    for (const auto& r : g.rules) {
        if (r.rhs.empty()) {
            throw std::invalid_argument("grammar_counts: epsilon productions are unsupported");
        }
        if (r.rhs.size() == 1 && nts.count(r.rhs[0])) {
            throw std::invalid_argument(
                "grammar_counts: single-nonterminal replacements are unsupported");
        }
    }
}

}  // namespace

std::map<std::vector<int>, std::uint64_t> grammar_counts(const GrammarSpec& g, int n) {
    if (n < 1) throw std::invalid_argument("grammar_counts: n must be positive");
    if (n > kGrammarMaxLength) throw std::length_error("grammar_counts: n exceeds the supported cap");
    const std::set<std::string> nts = [&] {
        std::set<std::string> s;
        for (const auto& r : g.rules) s.insert(r.lhs);
        return s;
    }();
    validate_grammar_for_dp(g, nts);

    const int dim = static_cast<int>(g.tracked.size());
    auto tracked_index = [&](const std::string& sym) {
        for (int i = 0; i < dim; ++i) {
            if (g.tracked[i] == sym) return i;
        }
        return -1;
    };

    std::map<std::string, std::vector<CountMap>> table;  // [nt][len]
    for (const auto& nt : nts) table[nt].assign(n + 1, CountMap{});

    for (int len = 1; len <= n; ++len) {
        for (const auto& rule : g.rules) {
            // fold the rule's symbols left to right over (length, counts);
            // every remaining symbol consumes at least one position, which
            // caps each child length below len and keeps the recursion on
            // already finished table rows
            const int nsyms = static_cast<int>(rule.rhs.size());
            CountMap acc;
            acc[std::vector<int>(dim, 0)] = 1;
            std::map<int, CountMap> partial;  // consumed length -> counts
            partial[0] = std::move(acc);
            for (int si = 0; si < nsyms; ++si) {
                const std::string& sym = rule.rhs[si];
                const int rest = nsyms - 1 - si;
                std::map<int, CountMap> next;
                if (!nts.count(sym)) {
                    const int ti = tracked_index(sym);
                    for (const auto& [used, cm] : partial) {
                        if (used + 1 + rest > len) continue;
                        for (const auto& [vec, cnt] : cm) {
                            std::vector<int> v = vec;
                            if (ti >= 0) v[ti] += 1;
                            std::uint64_t& slot = next[used + 1][v];
                            slot = checked_add(slot, cnt);
                        }
                    }
                } else {
                    for (const auto& [used, cm] : partial) {
                        for (int sub = 1; used + sub + rest <= len; ++sub) {
                            const CountMap& child = table[sym][sub];
                            if (child.empty()) continue;
                            for (const auto& [vec, cnt] : cm) {
                                for (const auto& [cvec, ccnt] : child) {
                                    std::vector<int> v = vec;
                                    for (int i = 0; i < dim; ++i) v[i] += cvec[i];
                                    std::uint64_t& slot = next[used + sub][v];
                                    slot = checked_add(slot, checked_mul(cnt, ccnt));
                                }
                            }
                        }
                    }
                }
                partial = std::move(next);
            }
            auto it = partial.find(len);
            if (it == partial.end()) continue;
            CountMap& dst = table[rule.lhs][len];
            for (const auto& [vec, cnt] : it->second) {
                std::uint64_t& slot = dst[vec];
                slot = checked_add(slot, cnt);
            }
        }
    }
    return table[g.start][n];
}

LatticeDistribution grammar_law(const GrammarSpec& g, int n) {
    const auto counts = grammar_counts(g, n);
    if (counts.empty()) {
        throw std::invalid_argument("grammar_law: the language has no words of this length");
    }
    std::uint64_t total = 0;
    for (const auto& [k, c] : counts) total = checked_add(total, c);
    const int dim = static_cast<int>(g.tracked.size());
    std::vector<std::pair<std::vector<int>, double>> atoms;
    for (const auto& [k, c] : counts) {
        atoms.emplace_back(k, static_cast<double>(c) / static_cast<double>(total));
    }
    return LatticeDistribution::from_atoms(dim, std::vector<double>(dim, 0.0),
                                           std::vector<double>(dim, 1.0), std::move(atoms));
}

// --- dissections --------------------------------------------------------------

DissectionSpec::DissectionSpec(std::vector<SizeClass> classes_, int max_n_)
    : classes(std::move(classes_)), max_n(max_n_) {
    if (classes.empty()) throw std::invalid_argument("DissectionSpec: need at least one class");
    if (max_n < 3 || max_n > 22) throw std::invalid_argument("DissectionSpec: max_n must be in [3, 22]");
    int remaining = 0;
    std::set<int> seen;
    for (const auto& c : classes) {
        if (c.all_remaining) {
            ++remaining;
            continue;
        }
        for (int s : c.sizes) {
            if (s < 3) throw std::invalid_argument("DissectionSpec: polygon sizes start at 3");
            if (!seen.insert(s).second) {
                throw std::invalid_argument("DissectionSpec: classes must be disjoint");
            }
        }
    }
    if (remaining > 1) throw std::invalid_argument("DissectionSpec: at most one open class");
}

std::vector<int> DissectionSpec::class_sizes(int index) const {
    const SizeClass& c = classes.at(index);
    if (!c.all_remaining) {
        std::vector<int> out;
        for (int s : c.sizes) {
            if (s <= max_n) out.push_back(s);
        }
        std::sort(out.begin(), out.end());
        return out;
    }
    std::set<int> taken;
    for (const auto& other : classes) {
        for (int s : other.sizes) taken.insert(s);
    }
    std::vector<int> out;
    for (int s = 3; s <= max_n; ++s) {
        if (!taken.count(s)) out.push_back(s);
    }
    return out;
}

namespace {

// multivariate polynomial in the class markers, exact integer coefficients
using XPoly = std::map<std::vector<int>, BigInt>;
// truncated series in z: index = z-degree (0-based), degree <= max_n - 1
using ZSeries = std::vector<XPoly>;

XPoly xpoly_mul(const XPoly& a, const XPoly& b, int t) {
    XPoly out;
    std::vector<int> k(t);
    for (const auto& [ka, va] : a) {
        for (const auto& [kb, vb] : b) {
            for (int i = 0; i < t; ++i) k[i] = ka[i] + kb[i];
            out[k] += va * vb;
        }
    }
    return out;
}

ZSeries zseries_mul(const ZSeries& a, const ZSeries& b, int zcap, int t) {
    ZSeries out(zcap + 1);
    for (int i = 0; i <= zcap; ++i) {
        if (a[i].empty()) continue;
        for (int j = 0; i + j <= zcap; ++j) {
            if (b[j].empty()) continue;
            const XPoly prod = xpoly_mul(a[i], b[j], t);
            for (const auto& [k, v] : prod) out[i + j][k] += v;
        }
    }
    return out;
}

}  // namespace

std::map<std::vector<int>, BigInt> dissection_counts(const DissectionSpec& spec, int n) {
    // n = 2 is the bare-edge convention: one "dissection" with no faces.
    if (n < 2 || n > spec.max_n) throw std::invalid_argument("dissection_counts: n out of range");
    const int t = static_cast<int>(spec.classes.size());
    const int zcap = spec.max_n - 1;

    // f = z + sum_i x_i sum_{k in S_i} f^{k-1}; each pass pins one more
    // z-coefficient because every f-power on the right has valuation >= 2.
    ZSeries f(zcap + 1);
    f[1][std::vector<int>(t, 0)] = 1;
    for (int pass = 0; pass < zcap; ++pass) {
        ZSeries rhs(zcap + 1);
        rhs[1][std::vector<int>(t, 0)] = 1;
        for (int ci = 0; ci < t; ++ci) {
            const std::vector<int> sizes = spec.class_sizes(ci);
            if (sizes.empty()) continue;
            std::vector<int> marker(t, 0);
            marker[ci] = 1;
            // accumulate f^{k-1} by extending the previous power
            int have = 0;
            ZSeries power(zcap + 1);
            power[0][std::vector<int>(t, 0)] = 1;
            for (int k : sizes) {
                while (have < k - 1) {
                    power = zseries_mul(power, f, zcap, t);
                    ++have;
                }
                for (int zd = 0; zd <= zcap; ++zd) {
                    for (const auto& [kk, v] : power[zd]) {
                        std::vector<int> shifted = kk;
                        shifted[ci] += 1;
                        rhs[zd][shifted] += v;
                    }
                }
            }
        }
        f = std::move(rhs);
    }

    std::map<std::vector<int>, BigInt> out;
    for (const auto& [k, v] : f[n - 1]) {
        if (v != 0) out[k] = v;
    }
    return out;
}

LatticeDistribution dissection_law(const DissectionSpec& spec, int n) {
    const auto counts = dissection_counts(spec, n);
    if (counts.empty()) throw std::invalid_argument("dissection_law: no dissections at this n");
    BigInt total = 0;
    for (const auto& [k, v] : counts) total += v;
    const int t = static_cast<int>(spec.classes.size());
    const double total_d = total.convert_to<double>();
    std::vector<std::pair<std::vector<int>, double>> atoms;
    for (const auto& [k, v] : counts) {
        atoms.emplace_back(k, v.convert_to<double>() / total_d);
    }
    return LatticeDistribution::from_atoms(t, std::vector<double>(t, 0.0),
                                           std::vector<double>(t, 1.0), std::move(atoms));
}

// --- i.i.d. sums ---------------------------------------------------------------

LatticeDistribution iid_sum_law(const LatticeDistribution& step_law, long long n, bool parallel) {
    if (n < 1) throw std::invalid_argument("iid_sum_law: n must be positive");
    LatticeDistribution result;
    LatticeDistribution power = step_law;
    bool have_result = false;
    long long k = n;
    while (k > 0) {
        if (k & 1) {
            result = have_result ? lattice_convolve(result, power, parallel) : power;
            have_result = true;
        }
        k >>= 1;
        if (k > 0) power = lattice_convolve(power, power, parallel);
    }
    return result;
}

QuasiPowerModel make_iid_model(const LatticeDistribution& step_law, int order) {
    const int m = step_law.dimension;
    // MGF of the step law as a truncated series: sum_atoms p * prod exp(x_l s_l)
    PowerSeries mgf(m, order);
    std::vector<int> k(m, 0);
    for (std::size_t atom = 0; atom < step_law.atom_count(); ++atom) {
        PowerSeries term(m, order);
        term.set(std::vector<int>(m, 0), step_law.mass[atom]);
        for (int ax = 0; ax < m; ++ax) {
            PowerSeries e(m, order);
            double pw = 1.0, fact = 1.0;
            for (int d = 0; d <= order; ++d) {
                std::fill(k.begin(), k.end(), 0);
                k[ax] = d;
                if (d > 0) {
                    pw *= step_law.coord(atom, ax);
                    fact *= d;
                }
                e.set(k, pw / fact);
            }
            term = series_product(term, e);
        }
        mgf = series_add(mgf, term);
    }
    PowerSeries u = series_log(mgf);
    PowerSeries v(m, order);

    LatticeDistribution step_copy = step_law;
    return QuasiPowerModel(
        std::move(u), std::move(v), [](long long n) { return static_cast<double>(n); },
        [](long long) { return std::numeric_limits<double>::infinity(); }, 1.0,
        [step_copy](long long n) { return iid_sum_law(step_copy, n); });
}

StandardizedPair empirical_standardized_pair(
    const std::function<LatticeDistribution(long long)>& law_at, long long n) {
    if (n < 2) throw std::invalid_argument("empirical_standardized_pair: need n >= 2");
    const LatticeDistribution prev = law_at(n - 1);
    const LatticeDistribution cur = law_at(n);
    const int m = cur.dimension;

    const std::vector<double> mean_prev = lattice_mean(prev);
    const std::vector<double> mean_cur = lattice_mean(cur);
    const std::vector<double> cov_prev = lattice_cov(prev);
    const std::vector<double> cov_cur = lattice_cov(cur);

    std::vector<double> grad_u(m), sigma(static_cast<std::size_t>(m) * m);
    for (int i = 0; i < m; ++i) grad_u[i] = mean_cur[i] - mean_prev[i];
    for (std::size_t i = 0; i < sigma.size(); ++i) sigma[i] = cov_cur[i] - cov_prev[i];
    // symmetrize away roundoff before the constructor's symmetry check
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            const double s = 0.5 * (sigma[i * m + j] + sigma[j * m + i]);
            sigma[i * m + j] = sigma[j * m + i] = s;
        }
    }
    if (!is_positive_definite(sigma, m)) {
        throw std::domain_error(
            "empirical_standardized_pair: degenerate estimated covariance; the degenerate case is "
            "exercised by the rademacher demo");
    }

    const double phi = static_cast<double>(n);
    std::vector<double> center(m);
    for (int i = 0; i < m; ++i) center[i] = grad_u[i] * phi;
    StandardizedPair out{standardize(cur, center, std::sqrt(phi)),
                         GaussianSpec(std::vector<double>(m, 0.0), std::move(sigma)), phi};
    return out;
}

// --- rademacher demo ------------------------------------------------------------

std::pair<LatticeDistribution, double> rademacher_demo(long long n) {
    if (n < 1) throw std::invalid_argument("rademacher_demo: n must be positive");
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    LatticeDistribution law = LatticeDistribution::from_atoms(
        1, {0.0}, {scale}, {{{-1}, 0.5}, {{1}, 0.5}});

    // sup over R of |F_n - [x >= 0]|: both CDFs are steps, so the extremes sit
    // at the one-sided limits of the jump points.
    auto f_n = [&](double x) {
        double c = 0.0;
        for (std::size_t atom = 0; atom < law.atom_count(); ++atom) {
            if (law.coord(atom, 0) <= x) c += law.mass[atom];
        }
        return c;
    };
    auto f_limit = [](double x) { return x >= 0.0 ? 1.0 : 0.0; };
    const double eps = scale * 1e-9;
    double best = 0.0;
    for (double z : {-scale, 0.0, scale}) {
        for (double x : {z - eps, z}) {
            best = std::max(best, std::abs(f_n(x) - f_limit(x)));
        }
    }
    return {std::move(law), best};
}

}  // namespace qpbe
