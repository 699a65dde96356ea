#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <functional>
#include <limits>

#include "qpbe/models.hpp"
#include "qpbe/quasi_power.hpp"

using namespace qpbe;
using cplx = std::complex<double>;

namespace {

LatticeDistribution bernoulli_step() {
    return LatticeDistribution::from_atoms(1, {0.0}, {1.0}, {{{0}, 0.5}, {{1}, 0.5}});
}

LatticeDistribution correlated_step() {
    return LatticeDistribution::from_atoms(
        2, {0.0, 0.0}, {1.0, 1.0}, {{{0, 0}, 0.25}, {{0, 1}, 0.25}, {{1, 1}, 0.25}, {{1, 2}, 0.25}});
}

double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(1e-30, std::abs(want));
}

}  // namespace

TEST_CASE("moment polynomial basics") {
    const QuasiPowerModel model = make_iid_model(bernoulli_step());
    // empty exponent: constant 1 because u(0) = v(0) = 0
    const Poly1 p0 = moment_polynomial(model, {0});
    CHECK(p0.eval(10.0) == doctest::Approx(1.0).epsilon(1e-15));

    // unit exponent: u_j X + v_j
    const Poly1 p1 = moment_polynomial(model, {1});
    CHECK(p1.c.size() >= 2);
    CHECK(p1.c[0] == doctest::Approx(model.grad_v()[0]).epsilon(1e-14));
    CHECK(p1.c[1] == doctest::Approx(model.grad_u()[0]).epsilon(1e-14));

    // degree never exceeds |k|
    CHECK(moment_polynomial(model, {3}).degree() <= 3);
    CHECK_THROWS_AS(moment_polynomial(model, {5}), std::invalid_argument);
}

TEST_CASE("mean and covariance against exact enumeration") {
    for (const auto& step : {bernoulli_step(), correlated_step()}) {
        const QuasiPowerModel model = make_iid_model(step);
        for (long long n : {1LL, 8LL, 32LL}) {
            const LatticeDistribution law = model.exact_law(n);
            const auto [mean, cov] = mean_cov(model, n);
            const auto exact_mean = lattice_mean(law);
            const auto exact_cov = lattice_cov(law);
            for (std::size_t i = 0; i < mean.size(); ++i) {
                CHECK(rel_err(mean[i], exact_mean[i]) < 1e-10);
            }
            for (std::size_t i = 0; i < cov.size(); ++i) {
                CHECK(std::abs(cov[i] - exact_cov[i]) < 1e-10 * (1.0 + std::abs(exact_cov[i])));
            }
        }
    }
}

TEST_CASE("symmetric step laws have zero drift") {
    const LatticeDistribution sym = LatticeDistribution::from_atoms(
        1, {0.0}, {1.0}, {{{-1}, 0.5}, {{1}, 0.5}});
    const QuasiPowerModel model = make_iid_model(sym);
    CHECK(std::abs(model.grad_u()[0]) < 1e-14);
    const auto [mean, cov] = mean_cov(model, 100);
    CHECK(std::abs(mean[0]) < 1e-12);
    CHECK(cov[0] == doctest::Approx(100.0).epsilon(1e-12));
}

TEST_CASE("cross moments match k! p_k(phi_n)") {
    for (const auto& step : {bernoulli_step(), correlated_step()}) {
        const QuasiPowerModel model = make_iid_model(step);
        const int m = model.dimension();
        const long long n = 32;
        const LatticeDistribution law = model.exact_law(n);

        std::vector<std::vector<int>> exponents;
        std::vector<int> k(m, 0);
        std::function<void(int, int)> gen = [&](int pos, int remaining) {
            if (pos == m) {
                exponents.push_back(k);
                return;
            }
            for (int e = 0; e <= remaining; ++e) {
                k[pos] = e;
                gen(pos + 1, remaining - e);
            }
            k[pos] = 0;
        };
        gen(0, 3);

        for (const auto& kk : exponents) {
            double kfact = 1.0;
            for (int e : kk) {
                for (int i = 2; i <= e; ++i) kfact *= i;
            }
            const double predicted =
                kfact * moment_polynomial(model, kk).eval(static_cast<double>(n));
            const double exact = lattice_moment(law, kk);
            CHECK(rel_err(predicted, exact) < 1e-9);
        }
    }
}

TEST_CASE("standardize relabels the grid") {
    const LatticeDistribution binom4 = iid_sum_law(bernoulli_step(), 4);
    const std::vector<double> center = {2.0};
    const LatticeDistribution std4 = standardize(binom4, center, 1.0);
    CHECK(std4.atom_count() == binom4.atom_count());
    CHECK(std4.mass == binom4.mass);
    CHECK(std4.coord(0, 0) == doctest::Approx(binom4.coord(0, 0) - 2.0).epsilon(1e-15));

    // identity standardization
    const std::vector<double> zero = {0.0};
    const LatticeDistribution same = standardize(binom4, zero, 1.0);
    CHECK(same.offset == binom4.offset);
    CHECK(same.step == binom4.step);

    // mean 0, variance 1 after the (n/2, sqrt(n/4)) relabeling
    const LatticeDistribution unit = standardize(binom4, center, std::sqrt(4.0 / 4.0));
    CHECK(std::abs(lattice_mean(unit)[0]) < 1e-15);
    CHECK(lattice_cov(unit)[0] == doctest::Approx(1.0).epsilon(1e-14));

    // composing two standardizations equals one composed affine map
    const LatticeDistribution a = standardize(binom4, center, 2.0);
    const std::vector<double> c2 = {-1.0};
    const LatticeDistribution b = standardize(a, c2, 0.5);
    const std::vector<double> c3 = {2.0 + 2.0 * -1.0};
    const LatticeDistribution direct = standardize(binom4, c3, 1.0);
    CHECK(b.offset[0] == doctest::Approx(direct.offset[0]).epsilon(1e-14));
    CHECK(b.step[0] == doctest::Approx(direct.step[0]).epsilon(1e-14));

    CHECK_THROWS_AS(standardize(binom4, center, 0.0), std::invalid_argument);
}

TEST_CASE("lattice characteristic functions") {
    // point mass
    const LatticeDistribution pt = LatticeDistribution::from_atoms(1, {1.5}, {1.0}, {{{0}, 1.0}});
    const CharEvaluator phi_pt = lattice_charfn(pt);
    const std::vector<double> t = {0.9};
    CHECK(std::abs(phi_pt(t) - std::polar(1.0, 1.35)) < 1e-15);

    // symmetric coin: cos t
    const LatticeDistribution coin = LatticeDistribution::from_atoms(
        1, {0.0}, {1.0}, {{{-1}, 0.5}, {{1}, 0.5}});
    const CharEvaluator phi_coin = lattice_charfn(coin);
    for (double x : {0.0, 0.5, 2.0, -3.1}) {
        const std::vector<double> arg = {x};
        CHECK(std::abs(phi_coin(arg) - cplx(std::cos(x), 0.0)) < 1e-14);
    }

    // independent pair: cos t1 cos t2
    std::vector<std::pair<std::vector<int>, double>> atoms;
    for (int i : {-1, 1}) {
        for (int j : {-1, 1}) atoms.push_back({{i, j}, 0.25});
    }
    const LatticeDistribution pair = LatticeDistribution::from_atoms(
        2, {0.0, 0.0}, {1.0, 1.0}, std::move(atoms));
    const CharEvaluator phi2 = lattice_charfn(pair);
    const std::vector<double> t2 = {0.7, -1.2};
    CHECK(std::abs(phi2(t2) - cplx(std::cos(0.7) * std::cos(-1.2), 0.0)) < 1e-14);

    // modulus bound and Hermitian symmetry on a grid
    const CharEvaluator phi_c = lattice_charfn(iid_sum_law(correlated_step(), 8));
    for (double a = -2.0; a <= 2.0; a += 0.4) {
        for (double b = -2.0; b <= 2.0; b += 0.4) {
            const std::vector<double> u = {a, b};
            const std::vector<double> nu = {-a, -b};
            CHECK(std::abs(phi_c(u)) <= 1.0 + 1e-12);
            CHECK(std::abs(phi_c(u) - std::conj(phi_c(nu))) < 1e-13);
        }
    }
}

TEST_CASE("rate experiment fits the square-root decay") {
    const QuasiPowerModel model = make_iid_model(bernoulli_step());
    const RateResult res = rate_experiment(model, {16, 32, 64, 128, 256});
    CHECK(res.rows.size() == 5);
    CHECK(res.fitted_slope > -0.62);
    CHECK(res.fitted_slope < -0.38);
    // distances decrease
    for (std::size_t i = 1; i < res.rows.size(); ++i) {
        CHECK(res.rows[i].sup_distance < res.rows[i - 1].sup_distance);
    }
}

TEST_CASE("degenerate limit covariance is refused") {
    // fully correlated pair (xi, xi): rank-1 covariance
    const LatticeDistribution degenerate = LatticeDistribution::from_atoms(
        2, {0.0, 0.0}, {1.0, 1.0}, {{{0, 0}, 0.5}, {{1, 1}, 0.5}});
    const QuasiPowerModel model = make_iid_model(degenerate);
    CHECK_THROWS_WITH_AS(rate_experiment(model, {4, 8}), doctest::Contains("rademacher"),
                         std::domain_error);
}

TEST_CASE("model normalization and metadata") {
    PowerSeries u(1, 4), v(1, 4);
    u.set({0}, 3.0).set({1}, 0.5).set({2}, 0.125);
    v.set({0}, -1.0).set({1}, 0.25);
    const QuasiPowerModel model(
        u, v, [](long long n) { return static_cast<double>(n); },
        [](long long) { return std::numeric_limits<double>::infinity(); }, 2.0, nullptr);
    CHECK(model.u.constant_term() == 0.0);
    CHECK(model.v.constant_term() == 0.0);
    CHECK(model.grad_u()[0] == 0.5);
    CHECK(model.tau == 2.0);
    CHECK(std::isinf(model.kappa(10)));
    CHECK_THROWS_AS(standardized_pair(model, 4), std::invalid_argument);
}
