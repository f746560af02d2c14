#pragma once

// Brute-force reference computations used by the tests. Nothing here shares code with
// the library's quadrature: integrals use adaptive Gauss-Kronrod (7/15) bisection.

#include <array>
#include <cmath>
#include <functional>

namespace oracle {

inline double gk15(const std::function<double(double)>& f, double a, double b, double& err) {
    static constexpr std::array<double, 8> xk = {
        0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
        0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
        0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
    static constexpr std::array<double, 8> wk = {
        0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
        0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
    static constexpr std::array<double, 4> wg = {
        0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
        0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double kron = wk[7] * fc;
    double gauss = wg[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double f1 = f(c - h * xk[static_cast<std::size_t>(i)]);
        const double f2 = f(c + h * xk[static_cast<std::size_t>(i)]);
        kron += wk[static_cast<std::size_t>(i)] * (f1 + f2);
        if (i % 2 == 1) gauss += wg[static_cast<std::size_t>(i / 2)] * (f1 + f2);
    }
    err = std::abs((kron - gauss) * h);
    return kron * h;
}

inline double adaptive(const std::function<double(double)>& f, double a, double b, double tol, int depth = 0) {
    double err = 0.0;
    const double whole = gk15(f, a, b, err);
    if (err <= tol || err <= 1e-14 * std::abs(whole) || depth >= 50) return whole;
    const double m = 0.5 * (a + b);
    return adaptive(f, a, m, 0.5 * tol, depth + 1) + adaptive(f, m, b, 0.5 * tol, depth + 1);
}

/// int_0^1 (1-z)^a z^b F(z) dz with z = u^p on [0,1/2] and 1 - z = v^q on [1/2,1], where
/// p = 1/(b+1), q = 1/(a+1) absorb the endpoint powers (p = q = 2 when a = b = -1/2).
inline double jacobi_weighted(const std::function<double(double)>& F, double a, double b, double tol) {
    const double p = 1.0 / (b + 1.0);
    const double q = 1.0 / (a + 1.0);
    auto left = [&](double u) {
        const double z = std::pow(u, p);
        return p * std::pow(1.0 - z, a) * F(z);
    };
    auto right = [&](double v) {
        const double z = 1.0 - std::pow(v, q);
        return q * std::pow(z, b) * F(z);
    };
    return adaptive(left, 0.0, std::pow(0.5, b + 1.0), tol) + adaptive(right, 0.0, std::pow(0.5, a + 1.0), tol);
}

/// g(t) for an arbitrary exponent alpha(.) with alpha(0) = a0.
inline double g_value(const std::function<double(double)>& alpha, double t, double tol = 1e-15) {
    if (t == 0.0) return 1.0;
    const double a0 = alpha(0.0);
    auto F = [&](double z) {
        const double tz = t * z;
        if (tz == 0.0) return 1.0 / (std::tgamma(a0 - 1.0) * std::tgamma(2.0 - a0));
        const double al = alpha(tz);
        return std::pow(tz, a0 - al) / (std::tgamma(a0 - 1.0) * std::tgamma(2.0 - al));
    };
    return jacobi_weighted(F, a0 - 2.0, 1.0 - a0, tol);
}

/// (1/tau) int_{t_{n-1}}^{t_n} int_{t_{j-1}}^{min(t, t_j)} beta_abar(t - s) ds dt, by nested
/// adaptive quadrature with r = t - s = rho^2 in the inner integral.
inline double averaged_pi_weight(double abar, double tau, int n, int j) {
    const double g = std::tgamma(abar);
    auto inner = [&](double t) {
        const double lo = (j - 1) * tau;
        const double hi = std::min(t, j * tau);
        if (hi <= lo) return 0.0;
        const double r_min = t - hi;
        const double r_max = t - lo;
        auto integrand = [&](double rho) { return 2.0 * std::pow(rho, 2.0 * abar - 1.0) / g; };
        return adaptive(integrand, std::sqrt(r_min), std::sqrt(r_max), 1e-16);
    };
    return adaptive(inner, (n - 1) * tau, n * tau, 1e-15) / tau;
}

}  // namespace oracle
