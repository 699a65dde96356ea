#pragma once

#include <span>

namespace qpbe {

// Density (3/(8 pi)) (sin(z/4)/(z/4))^4 with its removable singularity filled.
double density_f_P(double z);

// Its characteristic function: 1 - 6t^2 + 6|t|^3 on [0,1/2], 2(1-|t|)^3 on
// [1/2,1], zero beyond.
double charfn_phi_P(double t);

// Distribution function of P, by adaptive quadrature; the half line below 0
// carries mass exactly 1/2 by symmetry.
double cdf_P(double x);

// cbrt(32 / (pi (1 - (3/4)^{1/m}))).
double constant_C1(int m);

// 12 / pi.
double constant_C2();

// The positive quantile with cdf_P(lambda) = (3/4)^{1/m}, solved by bisection.
// Requires 1 <= m <= 8 and tol >= 1e-12; the result never exceeds C1(m).
double solve_lambda(int m, double tol);

// prod_j charfn_phi_P(t_j / T); vanishes as soon as any |t_j| >= T.
double kernel_Q_charfn(std::span<const double> t, double T);

struct KernelConstants {
    int m = 1;
    double T = 1.0;
    double lambda = 0.0;
    double C1 = 0.0;
    double C2 = 0.0;

    static KernelConstants make(int m, double T, double tol = 1e-10);
};

}  // namespace qpbe
