#include "qpbe/berry_esseen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>

#include "qpbe/lambda_operator.hpp"
#include "qpbe/numerics.hpp"
#include "qpbe/partition_lattice.hpp"
#include "qpbe/quasi_power.hpp"
#include "qpbe/smoothing_kernel.hpp"

namespace qpbe {

namespace {

constexpr double kHoldsSlack = 1e-6;  // relative to rhs_total

std::vector<int> mask_to_axes(std::uint32_t mask, int m) {
    std::vector<int> axes;
    for (int ax = 0; ax < m; ++ax) {
        if (mask & (1u << ax)) axes.push_back(ax + 1);
    }
    return axes;
}

// --- exact sup over the cell decomposition ---------------------------------

struct CornerGrid {
    int m = 0;
    std::vector<std::vector<double>> values;  // per axis, ascending
    std::vector<std::int64_t> stride;         // over ranks
    std::int64_t cells = 1;

    std::int64_t index(const std::vector<int>& rank) const {
        std::int64_t idx = 0;
        for (int ax = 0; ax < m; ++ax) idx += rank[ax] * stride[ax];
        return idx;
    }
};

CornerGrid make_corner_grid(const LatticeDistribution& x) {
    CornerGrid g;
    g.m = x.dimension;
    g.values.resize(g.m);
    for (int ax = 0; ax < g.m; ++ax) {
        std::vector<int> ks;
        ks.reserve(x.atom_count());
        for (std::size_t atom = 0; atom < x.atom_count(); ++atom) ks.push_back(x.key(atom)[ax]);
        std::sort(ks.begin(), ks.end());
        ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
        for (int k : ks) g.values[ax].push_back(x.offset[ax] + x.step[ax] * k);
    }
    g.stride.assign(g.m, 1);
    for (int ax = g.m - 2; ax >= 0; --ax) {
        g.stride[ax] = g.stride[ax + 1] * static_cast<std::int64_t>(g.values[ax + 1].size());
    }
    g.cells = g.stride[0] * static_cast<std::int64_t>(g.values[0].size());
    return g;
}

// P(X <= corner) on the rank grid via axiswise prefix sums.
std::vector<double> lattice_cdf_grid(const LatticeDistribution& x, const CornerGrid& g) {
    std::vector<double> grid(static_cast<std::size_t>(g.cells), 0.0);
    for (std::size_t atom = 0; atom < x.atom_count(); ++atom) {
        std::int64_t idx = 0;
        for (int ax = 0; ax < g.m; ++ax) {
            const double c = x.coord(atom, ax);
            const auto& vals = g.values[ax];
            const auto it = std::lower_bound(vals.begin(), vals.end(), c);
            idx += static_cast<std::int64_t>(it - vals.begin()) * g.stride[ax];
        }
        grid[static_cast<std::size_t>(idx)] += x.mass[atom];
    }
    for (int ax = 0; ax < g.m; ++ax) {
        const std::int64_t r = static_cast<std::int64_t>(g.values[ax].size());
        const std::int64_t st = g.stride[ax];
        for (std::int64_t base = 0; base < g.cells; ++base) {
            // walk only the slabs whose rank along ax is zero
            if ((base / st) % r != 0) continue;
            for (std::int64_t k = 1; k < r; ++k) {
                grid[static_cast<std::size_t>(base + k * st)] +=
                    grid[static_cast<std::size_t>(base + (k - 1) * st)];
            }
        }
    }
    return grid;
}

std::vector<double> gaussian_cdf_grid(const GaussianSpec& y, const CornerGrid& g, double tol,
                                      bool parallel) {
    // Whether gaussian_cdf throws depends on (y, tol) only, never on the
    // point, so one probe outside the parallel region surfaces any error;
    // nothing can throw inside the loop afterwards.
    gaussian_cdf(y, std::vector<double>(y.dim(), 0.0), tol);

    std::vector<double> grid(static_cast<std::size_t>(g.cells), 0.0);
#pragma omp parallel for schedule(static) if (parallel)
    for (std::int64_t idx = 0; idx < g.cells; ++idx) {
        std::vector<double> pt(g.m);
        std::int64_t rem = idx;
        for (int ax = 0; ax < g.m; ++ax) {
            pt[ax] = g.values[ax][static_cast<std::size_t>(rem / g.stride[ax])];
            rem %= g.stride[ax];
        }
        grid[static_cast<std::size_t>(idx)] = gaussian_cdf(y, pt, tol);
    }
    return grid;
}

}  // namespace

int QuadConfig::resolve(int m) const {
    int n = nodes_per_axis;
    if (n == 0) n = (m <= 2) ? 64 : 32;
    if (n < 2 || n % 2 != 0) {
        throw std::invalid_argument("QuadConfig: node count per axis must be even and >= 2");
    }
    return n;
}

double sup_cdf_distance(const LatticeDistribution& x, const GaussianSpec& y, double tol,
                        bool parallel) {
    const int m = x.dimension;
    if (m != y.dim()) throw std::invalid_argument("sup_cdf_distance: dimension mismatch");
    if (m > 3) throw std::invalid_argument("sup_cdf_distance: dimensions above 3 are unsupported");

    const CornerGrid g = make_corner_grid(x);
    const std::vector<double> fx = lattice_cdf_grid(x, g);
    const std::vector<double> fy = gaussian_cdf_grid(y, g, tol, parallel);

    // marginal Gaussian grids for the faces sent to +infinity
    const std::uint32_t full = (1u << m) - 1u;
    std::vector<std::vector<double>> fy_marginal(full);  // keyed by kept-axis mask
    std::vector<std::vector<std::int64_t>> marg_stride(full);
    for (std::uint32_t keep = 1; keep < full; ++keep) {
        const std::vector<int> axes = mask_to_axes(keep, m);
        const GaussianSpec ym = gaussian_marginal(y, axes);
        gaussian_cdf(ym, std::vector<double>(ym.dim(), 0.0), tol);  // probe before the omp loop
        std::vector<std::int64_t> st(axes.size(), 1);
        std::int64_t count = 1;
        for (int i = static_cast<int>(axes.size()) - 1; i >= 0; --i) {
            st[i] = count;
            count *= static_cast<std::int64_t>(g.values[axes[i] - 1].size());
        }
        std::vector<double> vals(static_cast<std::size_t>(count), 0.0);
#pragma omp parallel for schedule(static) if (parallel)
        for (std::int64_t idx = 0; idx < count; ++idx) {
            std::vector<double> pt(axes.size());
            std::int64_t rem = idx;
            for (std::size_t i = 0; i < axes.size(); ++i) {
                pt[i] = g.values[axes[i] - 1][static_cast<std::size_t>(rem / st[i])];
                rem %= st[i];
            }
            vals[static_cast<std::size_t>(idx)] = gaussian_cdf(ym, pt, tol);
        }
        fy_marginal[keep] = std::move(vals);
        marg_stride[keep] = std::move(st);
    }

    // closed-corner comparisons
    double best = 0.0;
    for (std::int64_t idx = 0; idx < g.cells; ++idx) {
        best = std::max(best, std::abs(fx[static_cast<std::size_t>(idx)] -
                                       fy[static_cast<std::size_t>(idx)]));
    }

    // per-cell upper-corner comparisons (open limits and +infinity faces)
    std::vector<int> r(m);
    std::int64_t total_cells = 1;
    for (int ax = 0; ax < m; ++ax) {
        r[ax] = static_cast<int>(g.values[ax].size());
        total_cells *= r[ax] + 1;
    }
    std::vector<int> t(m, 0);
    for (std::int64_t c = 0; c < total_cells; ++c) {
        double a = 0.0;
        bool below = false;
        for (int ax = 0; ax < m; ++ax) {
            if (t[ax] == 0) {
                below = true;
                break;
            }
        }
        if (!below) {
            std::int64_t idx = 0;
            for (int ax = 0; ax < m; ++ax) idx += static_cast<std::int64_t>(t[ax] - 1) * g.stride[ax];
            a = fx[static_cast<std::size_t>(idx)];
        }

        std::uint32_t keep = 0;
        for (int ax = 0; ax < m; ++ax) {
            if (t[ax] < r[ax]) keep |= 1u << ax;
        }
        double fy_up;
        if (keep == 0) {
            fy_up = 1.0;
        } else if (keep == full) {
            std::int64_t idx = 0;
            for (int ax = 0; ax < m; ++ax) idx += static_cast<std::int64_t>(t[ax]) * g.stride[ax];
            fy_up = fy[static_cast<std::size_t>(idx)];
        } else {
            const auto& st = marg_stride[keep];
            std::int64_t idx = 0;
            std::size_t i = 0;
            for (int ax = 0; ax < m; ++ax) {
                if (keep & (1u << ax)) idx += static_cast<std::int64_t>(t[ax]) * st[i++];
            }
            fy_up = fy_marginal[keep][static_cast<std::size_t>(idx)];
        }
        best = std::max(best, std::abs(a - fy_up));

        for (int ax = m - 1; ax >= 0; --ax) {
            if (++t[ax] <= r[ax]) break;
            t[ax] = 0;
        }
    }
    return best;
}

namespace {

// Raw int_{[-T,T]^m} |(Lambda(a) - Lambda(b)) / prod t_l| dt.
double quotient_integral(const CharEvaluator& a, const CharEvaluator& b, double T, int nodes,
                         bool parallel) {
    const int m = a.dimension;
    if (b.dimension != m) throw std::invalid_argument("integral_term: dimension mismatch");
    if (!(T > 0.0)) throw std::invalid_argument("integral_term: T must be positive");

    const auto [xs, ws] = gauss_legendre(nodes);
    std::vector<double> node(nodes), weight(nodes);
    for (int i = 0; i < nodes; ++i) {
        node[i] = T * xs[i];
        weight[i] = T * ws[i];
    }
    // even node counts keep every node off the hyperplanes; checked up front
    // so nothing throws inside the parallel region
    const double min_coord = 1e-6 * T;
    for (double v : node) {
        if (std::abs(v) < min_coord) {
            throw std::domain_error("integral_term: node on a coordinate hyperplane");
        }
    }

    std::int64_t total = 1;
    for (int ax = 0; ax < m; ++ax) total *= nodes;

    std::vector<double> cell(static_cast<std::size_t>(total), 0.0);
#pragma omp parallel for schedule(static) if (parallel)
    for (std::int64_t idx = 0; idx < total; ++idx) {
        std::vector<double> t(m);
        double w = 1.0;
        std::int64_t rem = idx;
        for (int ax = m - 1; ax >= 0; --ax) {
            const int i = static_cast<int>(rem % nodes);
            rem /= nodes;
            t[ax] = node[i];
            w *= weight[i];
        }
        double denom = 1.0;
        for (int ax = 0; ax < m; ++ax) denom *= t[ax];
        const std::complex<double> diff = lambda_apply(a, t) - lambda_apply(b, t);
        cell[static_cast<std::size_t>(idx)] = w * std::abs(diff / denom);
    }

    KahanSum acc;
    for (double v : cell) acc.add(v);
    return acc.value();
}

}  // namespace

double integral_term(const CharEvaluator& phi_x, const CharEvaluator& phi_y, double T,
                     const QuadConfig& quad) {
    const int m = phi_x.dimension;
    if (m > 3) throw std::invalid_argument("integral_term: dimensions above 3 are unsupported");
    const int nodes = quad.resolve(m);
    const double raw = quotient_integral(phi_x, phi_y, T, nodes, quad.parallel);
    return raw * 2.0 / std::pow(2.0 * std::numbers::pi, m);
}

BoundReport theorem2_rhs(const LatticeDistribution& x, const GaussianSpec& y, double T,
                         const QuadConfig& quad, double tol) {
    const int m = x.dimension;
    if (m != y.dim()) throw std::invalid_argument("theorem2_rhs: dimension mismatch");
    if (m > 3) throw std::invalid_argument("theorem2_rhs: dimensions above 3 are unsupported");

    BoundReport rep;
    rep.T = T;
    rep.integral_term = integral_term(lattice_charfn(x), make_gaussian_evaluator(y), T, quad);

    KahanSum marg;
    const std::uint32_t full = (1u << m) - 1u;
    for (std::uint32_t mask = 1; mask < full; ++mask) {
        const std::vector<int> J = mask_to_axes(mask, m);
        const double sup_j =
            sup_cdf_distance(lattice_marginal(x, J), gaussian_marginal(y, J), tol, quad.parallel);
        rep.marginal_sup[J] = sup_j;
        marg.add(static_cast<double>(fubini_number(m - static_cast<int>(J.size()))) * sup_j);
    }
    rep.marginal_term_total = 2.0 * marg.value();

    double a_sum = 0.0;
    for (int j = 1; j <= m; ++j) a_sum += derivative_bound_A(y, j);
    rep.kernel_term = 2.0 * a_sum * (constant_C1(m) + constant_C2()) / T;

    rep.rhs_total = rep.integral_term + rep.marginal_term_total + rep.kernel_term;
    return rep;
}

BoundReport verify_bound(const LatticeDistribution& x, const GaussianSpec& y, double T,
                         const QuadConfig& quad, double tol) {
    BoundReport rep = theorem2_rhs(x, y, T, quad, tol);
    rep.lhs_sup_distance = sup_cdf_distance(x, y, tol, quad.parallel);
    rep.holds = rep.lhs_sup_distance <= rep.rhs_total * (1.0 + kHoldsSlack);
    return rep;
}

CorollaryReport corollary_breakdown(const LatticeDistribution& x, const GaussianSpec& y, double T,
                                    const QuadConfig& quad) {
    if (x.dimension != y.dim()) throw std::invalid_argument("corollary_bound: dimension mismatch");
    return corollary_breakdown(lattice_charfn(x), make_gaussian_evaluator(y), y, T, quad);
}

CorollaryReport corollary_breakdown(const CharEvaluator& phi_x, const CharEvaluator& phi_y,
                                    const GaussianSpec& y, double T, const QuadConfig& quad) {
    const int m = phi_x.dimension;
    if (m != phi_y.dimension || m != y.dim()) {
        throw std::invalid_argument("corollary_bound: dimension mismatch");
    }
    if (m > 3) throw std::invalid_argument("corollary_bound: dimensions above 3 are unsupported");

    CorollaryReport rep;
    KahanSum total;
    const std::uint32_t full = (1u << m) - 1u;
    for (std::uint32_t mask = 1; mask <= full; ++mask) {
        std::vector<int> K = mask_to_axes(mask, m);
        std::vector<int> ground(m);
        for (int i = 0; i < m; ++i) ground[i] = i + 1;
        auto restrict_eval = [K, ground](const CharEvaluator& base) {
            return CharEvaluator(static_cast<int>(K.size()),
                                 [bp = &base, K, ground](std::span<const double> tk) {
                                     const std::vector<double> t = inject_chi(K, ground, tk);
                                     return (*bp)(t);
                                 });
        };
        const CharEvaluator xk = restrict_eval(phi_x);
        const CharEvaluator yk = restrict_eval(phi_y);
        const int nodes = quad.resolve(static_cast<int>(K.size()));
        const double val = quotient_integral(xk, yk, T, nodes, quad.parallel);
        rep.integral_by_subset[K] = val;
        total.add(val);
    }

    double a_sum = 0.0;
    for (int j = 1; j <= m; ++j) a_sum += derivative_bound_A(y, j);
    rep.kernel_part = a_sum / T;
    total.add(rep.kernel_part);
    rep.total = total.value();
    return rep;
}

double corollary_bound(const LatticeDistribution& x, const GaussianSpec& y, double T,
                       const QuadConfig& quad) {
    return corollary_breakdown(x, y, T, quad).total;
}

}  // namespace qpbe
