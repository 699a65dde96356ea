// Compares the OpenMP kernels against their serial counterparts: same inputs,
// timing for each, and the largest output deviation (expected 0 since the
// reductions run in a fixed order).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

#include "qpbe/berry_esseen.hpp"
#include "qpbe/models.hpp"
#include "qpbe/quasi_power.hpp"

using namespace qpbe;

namespace {

double time_ms(const std::function<double()>& run, double* out) {
    // best of three
    double best = 1e300;
    for (int rep = 0; rep < 3; ++rep) {
        const auto t0 = std::chrono::steady_clock::now();
        *out = run();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

void report(const char* name, double serial_ms, double parallel_ms, double diff) {
    std::printf("%-28s %10.1f ms %10.1f ms %7.2fx %12.3e\n", name, serial_ms, parallel_ms,
                serial_ms / parallel_ms, diff);
}

LatticeDistribution correlated_step() {
    return LatticeDistribution::from_atoms(
        2, {0.0, 0.0}, {1.0, 1.0}, {{{0, 0}, 0.25}, {{0, 1}, 0.25}, {{1, 1}, 0.25}, {{1, 2}, 0.25}});
}

}  // namespace

int main() {
    std::printf("%-28s %13s %13s %8s %12s\n", "kernel", "serial", "openmp", "speedup", "max |diff|");

    const QuasiPowerModel model = make_iid_model(correlated_step());
    const StandardizedPair pair = standardized_pair(model, 64);
    const CharEvaluator phi_x = lattice_charfn(pair.law);
    const CharEvaluator phi_y = make_gaussian_evaluator(pair.gauss);
    const double T = 8.0;

    {
        double a = 0.0, b = 0.0;
        const double ts = time_ms([&] { return integral_term(phi_x, phi_y, T, {64, false}); }, &a);
        const double tp = time_ms([&] { return integral_term(phi_x, phi_y, T, {64, true}); }, &b);
        report("integral_term m=2 n=64", ts, tp, std::abs(a - b));
    }
    {
        double a = 0.0, b = 0.0;
        const double ts = time_ms([&] { return sup_cdf_distance(pair.law, pair.gauss, 1e-9, false); }, &a);
        const double tp = time_ms([&] { return sup_cdf_distance(pair.law, pair.gauss, 1e-9, true); }, &b);
        report("sup_cdf_distance m=2 n=64", ts, tp, std::abs(a - b));
    }
    {
        const LatticeDistribution step = correlated_step();
        double a = 0.0, b = 0.0;
        const double ts = time_ms(
            [&] { return iid_sum_law(step, 256, false).mass.size() * 1.0; }, &a);
        const double tp = time_ms(
            [&] { return iid_sum_law(step, 256, true).mass.size() * 1.0; }, &b);
        // compare full mass vectors, not just sizes
        const LatticeDistribution ls = iid_sum_law(step, 256, false);
        const LatticeDistribution lp = iid_sum_law(step, 256, true);
        double diff = std::abs(a - b);
        if (ls.mass.size() == lp.mass.size()) {
            for (std::size_t i = 0; i < ls.mass.size(); ++i) {
                diff = std::max(diff, std::abs(ls.mass[i] - lp.mass[i]));
            }
        }
        report("iid_sum_law m=2 n=256", ts, tp, diff);
    }
    return 0;
}
