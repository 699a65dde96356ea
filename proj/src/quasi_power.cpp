#include "qpbe/quasi_power.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>

#include "qpbe/berry_esseen.hpp"
#include "qpbe/numerics.hpp"

namespace qpbe {

namespace {

std::vector<int> unit_index(int m, int j) {
    std::vector<int> k(m, 0);
    k[j] = 1;
    return k;
}

}  // namespace

QuasiPowerModel::QuasiPowerModel(PowerSeries u_, PowerSeries v_,
                                 std::function<double(long long)> phi_,
                                 std::function<double(long long)> kappa_, double tau_,
                                 std::function<LatticeDistribution(long long)> exact_law_)
    : u(std::move(u_)),
      v(std::move(v_)),
      phi(std::move(phi_)),
      kappa(std::move(kappa_)),
      tau(tau_),
      exact_law(std::move(exact_law_)) {
    if (u.dimension != v.dimension || u.order != v.order) {
        throw std::invalid_argument("QuasiPowerModel: u and v must share shape");
    }
    if (!phi) throw std::invalid_argument("QuasiPowerModel: phi mapping required");
    const std::vector<int> zero(u.dimension, 0);
    u.set(zero, 0.0);
    v.set(zero, 0.0);
}

std::vector<double> QuasiPowerModel::grad_u() const {
    const int m = dimension();
    std::vector<double> g(m);
    for (int j = 0; j < m; ++j) g[j] = u.at(unit_index(m, j));
    return g;
}

std::vector<double> QuasiPowerModel::grad_v() const {
    const int m = dimension();
    std::vector<double> g(m);
    for (int j = 0; j < m; ++j) g[j] = v.at(unit_index(m, j));
    return g;
}

namespace {

std::vector<double> hessian_of(const PowerSeries& s) {
    const int m = s.dimension;
    std::vector<double> h(static_cast<std::size_t>(m) * m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            std::vector<int> k(m, 0);
            k[i] += 1;
            k[j] += 1;
            h[static_cast<std::size_t>(i) * m + j] = s.at(k) * (i == j ? 2.0 : 1.0);
        }
    }
    return h;
}

}  // namespace

std::vector<double> QuasiPowerModel::hessian_u() const { return hessian_of(u); }
std::vector<double> QuasiPowerModel::hessian_v() const { return hessian_of(v); }

Poly1 moment_polynomial(const QuasiPowerModel& model, const std::vector<int>& k) {
    const PowerSeries& u = model.u;
    const PowerSeries& v = model.v;
    if (static_cast<int>(k.size()) != u.dimension) {
        throw std::invalid_argument("moment_polynomial: exponent dimension mismatch");
    }
    int total = 0;
    for (int e : k) {
        if (e < 0) throw std::invalid_argument("moment_polynomial: negative exponent");
        total += e;
    }
    if (total > u.order) throw std::invalid_argument("moment_polynomial: exponent beyond truncation");

    // exp over the polynomial coefficient ring: w = u X + v, then sum w^j / j!.
    using PolySeries = std::map<std::vector<int>, Poly1>;
    PolySeries w;
    for (const auto& [kk, c] : u.coeff) w[kk] = w[kk] + Poly1({0.0, c});
    for (const auto& [kk, c] : v.coeff) w[kk] = w[kk] + Poly1::constant(c);

    auto degree_of = [](const std::vector<int>& kk) {
        int d = 0;
        for (int e : kk) d += e;
        return d;
    };
    auto poly_series_mul = [&](const PolySeries& a, const PolySeries& b) {
        PolySeries out;
        std::vector<int> kk(u.dimension);
        for (const auto& [ka, pa] : a) {
            const int da = degree_of(ka);
            for (const auto& [kb, pb] : b) {
                if (da + degree_of(kb) > u.order) continue;
                for (int i = 0; i < u.dimension; ++i) kk[i] = ka[i] + kb[i];
                out[kk] = out[kk] + pa * pb;
            }
        }
        return out;
    };

    PolySeries result, power;
    const std::vector<int> zero(u.dimension, 0);
    result[zero] = Poly1::constant(1.0);
    power[zero] = Poly1::constant(1.0);
    double factorial = 1.0;
    for (int j = 1; j <= u.order; ++j) {
        power = poly_series_mul(power, w);
        factorial *= j;
        for (const auto& [kk, p] : power) result[kk] = result[kk] + p * (1.0 / factorial);
    }

    auto it = result.find(k);
    Poly1 out = (it == result.end()) ? Poly1::constant(0.0) : it->second;
    out.c.resize(static_cast<std::size_t>(total) + 1, 0.0);
    return out;
}

std::pair<std::vector<double>, std::vector<double>> mean_cov(const QuasiPowerModel& model,
                                                             long long n) {
    if (model.u.order < 2) throw std::invalid_argument("mean_cov: truncation order must be >= 2");
    const int m = model.dimension();
    const double p = model.phi(n);
    std::vector<double> mean = model.grad_u();
    const std::vector<double> gv = model.grad_v();
    for (int j = 0; j < m; ++j) mean[j] = mean[j] * p + gv[j];
    std::vector<double> cov = model.hessian_u();
    const std::vector<double> hv = model.hessian_v();
    for (std::size_t i = 0; i < cov.size(); ++i) cov[i] = cov[i] * p + hv[i];
    return {std::move(mean), std::move(cov)};
}

LatticeDistribution standardize(const LatticeDistribution& d, std::span<const double> center,
                                double scale) {
    if (!(scale > 0.0)) throw std::invalid_argument("standardize: scale must be positive");
    if (static_cast<int>(center.size()) != d.dimension) {
        throw std::invalid_argument("standardize: center dimension mismatch");
    }
    LatticeDistribution out = d;
    for (int ax = 0; ax < d.dimension; ++ax) {
        out.offset[ax] = (d.offset[ax] - center[ax]) / scale;
        out.step[ax] = d.step[ax] / scale;
    }
    return out;
}

namespace {

// Support data for one coordinate-subset marginal of a lattice law.
struct MarginalTable {
    std::vector<int> axes;      // 0-based axes kept
    std::vector<int> keys;      // atom_count * axes.size()
    std::vector<double> mass;
    std::vector<int> kmin;      // per kept axis
    std::vector<int> kmax;
};

struct CharfnData {
    int dimension;
    std::vector<double> offset;
    std::vector<double> step;
    std::vector<MarginalTable> by_mask;  // index = coordinate bitmask
    double total_mass;
};

std::shared_ptr<CharfnData> build_charfn_data(const LatticeDistribution& d) {
    auto data = std::make_shared<CharfnData>();
    const int m = d.dimension;
    data->dimension = m;
    data->offset = d.offset;
    data->step = d.step;
    {
        KahanSum t;
        for (double p : d.mass) t.add(p);
        data->total_mass = t.value();
    }
    const std::uint32_t full = (1u << m) - 1u;
    data->by_mask.resize(full + 1);
    for (std::uint32_t mask = 1; mask <= full; ++mask) {
        MarginalTable tab;
        for (int ax = 0; ax < m; ++ax) {
            if (mask & (1u << ax)) tab.axes.push_back(ax);
        }
        const int mj = static_cast<int>(tab.axes.size());
        std::map<std::vector<int>, double> merged;
        std::vector<int> sub(mj);
        for (std::size_t atom = 0; atom < d.atom_count(); ++atom) {
            for (int i = 0; i < mj; ++i) sub[i] = d.key(atom)[tab.axes[i]];
            merged[sub] += d.mass[atom];
        }
        tab.kmin.assign(mj, 0);
        tab.kmax.assign(mj, 0);
        bool first = true;
        for (const auto& [k, p] : merged) {
            tab.keys.insert(tab.keys.end(), k.begin(), k.end());
            tab.mass.push_back(p);
            for (int i = 0; i < mj; ++i) {
                if (first) {
                    tab.kmin[i] = tab.kmax[i] = k[i];
                } else {
                    tab.kmin[i] = std::min(tab.kmin[i], k[i]);
                    tab.kmax[i] = std::max(tab.kmax[i], k[i]);
                }
            }
            first = false;
        }
        data->by_mask[mask] = std::move(tab);
    }
    return data;
}

std::complex<double> charfn_eval(const CharfnData& data, std::span<const double> t) {
    const int m = data.dimension;
    std::uint32_t mask = 0;
    for (int ax = 0; ax < m; ++ax) {
        if (t[ax] != 0.0) mask |= 1u << ax;
    }
    if (mask == 0) return {data.total_mass, 0.0};

    const MarginalTable& tab = data.by_mask[mask];
    const int mj = static_cast<int>(tab.axes.size());

    // per-axis tables of e^{i t step k} over the key range
    std::vector<std::vector<std::complex<double>>> pow(mj);
    double phase0 = 0.0;
    for (int i = 0; i < mj; ++i) {
        const int ax = tab.axes[i];
        phase0 += t[ax] * data.offset[ax];
        const double w = t[ax] * data.step[ax];
        pow[i].resize(static_cast<std::size_t>(tab.kmax[i] - tab.kmin[i] + 1));
        for (int k = tab.kmin[i]; k <= tab.kmax[i]; ++k) {
            pow[i][static_cast<std::size_t>(k - tab.kmin[i])] = std::polar(1.0, w * k);
        }
    }

    KahanSum re, im;
    const std::size_t n = tab.mass.size();
    for (std::size_t atom = 0; atom < n; ++atom) {
        std::complex<double> z(tab.mass[atom], 0.0);
        const int* k = tab.keys.data() + atom * mj;
        for (int i = 0; i < mj; ++i) z *= pow[i][static_cast<std::size_t>(k[i] - tab.kmin[i])];
        re.add(z.real());
        im.add(z.imag());
    }
    return std::complex<double>(re.value(), im.value()) * std::polar(1.0, phase0);
}

}  // namespace

CharEvaluator lattice_charfn(const LatticeDistribution& d) {
    auto data = build_charfn_data(d);
    return CharEvaluator(d.dimension, [data](std::span<const double> t) {
        return charfn_eval(*data, t);
    });
}

StandardizedPair standardized_pair(const QuasiPowerModel& model, long long n) {
    if (!model.exact_law) throw std::invalid_argument("standardized_pair: model lacks an exact law");
    const int m = model.dimension();
    const double p = model.phi(n);
    const std::vector<double> gu = model.grad_u();
    std::vector<double> center(m);
    for (int j = 0; j < m; ++j) center[j] = gu[j] * p;
    StandardizedPair out{standardize(model.exact_law(n), center, std::sqrt(p)),
                         GaussianSpec(std::vector<double>(m, 0.0), model.hessian_u()), p};
    return out;
}

RateResult rate_experiment(const QuasiPowerModel& model, const std::vector<long long>& n_list,
                           double tol, bool parallel) {
    if (!model.exact_law) throw std::invalid_argument("rate_experiment: model lacks an exact law");
    const int m = model.dimension();
    if (m > 3) throw std::invalid_argument("rate_experiment: dimensions above 3 are unsupported");
    if (n_list.empty()) throw std::invalid_argument("rate_experiment: empty n list");
    if (!is_positive_definite(model.hessian_u(), m)) {
        throw std::domain_error(
            "rate_experiment: singular limit covariance; the degenerate case is exercised by the "
            "rademacher demo");
    }
    RateResult result;
    std::vector<double> logphi, logdist;
    for (long long n : n_list) {
        const StandardizedPair pair = standardized_pair(model, n);
        const double dist = sup_cdf_distance(pair.law, pair.gauss, tol, parallel);
        result.rows.push_back({n, pair.phi, dist});
        logphi.push_back(std::log(pair.phi));
        logdist.push_back(std::log(dist));
    }
    result.fitted_slope = ols_slope(logphi, logdist);
    return result;
}

}  // namespace qpbe
