#pragma once

// Dense reference steppers for the constant-exponent problem
//   v' + kappa A (beta_abar * v) = f-type data,
// on (0,1) with piecewise linear elements, written from the discrete equations
// without any library code. Data: u0 = x(1-x), ubar0 = x^2(1-x)^2, f = 1.

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "oracles.hpp"

namespace oracle {

struct ConstantOrderSetup {
    int J = 8;
    int N = 16;
    double T = 1.0;
    double abar = 0.5;
    double kappa = 1.0;
};

struct DenseFem {
    Eigen::MatrixXd M, S;
    Eigen::VectorXd ubar0_load, f_load, u0_grad_load, ritz_u0;
};

inline DenseFem dense_fem(int J) {
    const int n = J - 1;
    const double h = 1.0 / J;
    DenseFem d;
    d.M = Eigen::MatrixXd::Zero(n, n);
    d.S = Eigen::MatrixXd::Zero(n, n);
    d.ubar0_load = d.f_load = d.u0_grad_load = Eigen::VectorXd::Zero(n);
    auto ubar0 = [](double x) { return x * x * (1 - x) * (1 - x); };
    auto du0 = [](double x) { return 1 - 2 * x; };
    for (int e = 0; e < J; ++e) {
        const double xl = e * h;
        const double xr = xl + h;
        // local nodes e (left) and e+1 (right); interior index = node - 1
        const int nodes[2] = {e - 1, e};
        for (int a = 0; a < 2; ++a) {
            const int ia = nodes[a];
            if (ia < 0 || ia >= n) continue;
            auto phi_a = [&](double x) { return a == 0 ? (xr - x) / h : (x - xl) / h; };
            const double dphi_a = a == 0 ? -1.0 / h : 1.0 / h;
            double err = 0.0;
            d.ubar0_load[ia] += gk15([&](double x) { return ubar0(x) * phi_a(x); }, xl, xr, err);
            d.f_load[ia] += gk15([&](double x) { return phi_a(x); }, xl, xr, err);
            d.u0_grad_load[ia] += gk15([&](double x) { return du0(x) * dphi_a; }, xl, xr, err);
            for (int b = 0; b < 2; ++b) {
                const int ib = nodes[b];
                if (ib < 0 || ib >= n) continue;
                auto phi_b = [&](double x) { return b == 0 ? (xr - x) / h : (x - xl) / h; };
                const double dphi_b = b == 0 ? -1.0 / h : 1.0 / h;
                d.M(ia, ib) += gk15([&](double x) { return phi_a(x) * phi_b(x); }, xl, xr, err);
                d.S(ia, ib) += dphi_a * dphi_b * h;
            }
        }
    }
    d.ritz_u0 = d.S.ldlt().solve(d.u0_grad_load);
    return d;
}

/// Taylor coefficients of P(z)^(-abar), P(z) = (3 - 4z + z^2)/2, from P Q' = -abar P' Q.
inline std::vector<double> cq_by_miller(double abar, int count) {
    const double p[3] = {1.5, -2.0, 0.5};
    std::vector<double> q(static_cast<std::size_t>(count), 0.0);
    q[0] = std::pow(1.5, -abar);
    for (int n = 1; n < count; ++n) {
        // sum_k p_k (n-k) q_{n-k} = -abar sum_k k p_k q_{n-k}
        double s = 0.0;
        for (int k = 1; k <= 2 && k <= n; ++k) s += p[k] * ((n - k) + abar * k) * q[static_cast<std::size_t>(n - k)];
        q[static_cast<std::size_t>(n)] = -s / (p[0] * n);
    }
    return q;
}

/// All states U^0..U^N of the BDF2 + CQ scheme for u = v + Ritz(u0).
inline std::vector<Eigen::VectorXd> constant_order_bdf2_cq(const ConstantOrderSetup& c) {
    const DenseFem d = dense_fem(c.J);
    const double tau = c.T / c.N;
    const double ga1 = std::tgamma(c.abar + 1);
    const std::vector<double> chi = cq_by_miller(c.abar, c.N + 1);
    std::vector<Eigen::VectorXd> v(static_cast<std::size_t>(c.N) + 1, Eigen::VectorXd::Zero(c.J - 1));
    for (int n = 1; n <= c.N; ++n) {
        const double tn = n * tau;
        const double sum_chi = [&] {
            double s = 0.0;
            for (int j = 0; j < n; ++j) s += chi[static_cast<std::size_t>(j)];
            return s;
        }();
        const double omega = std::pow(n, c.abar) / ga1 - sum_chi;
        const Eigen::VectorXd F = -c.kappa * std::pow(tn, c.abar) / ga1 * d.u0_grad_load +
                                  std::pow(tn, c.abar) / ga1 * d.f_load + d.ubar0_load;
        Eigen::VectorXd hist = omega * v[0];
        for (int j = 1; j < n; ++j) hist += chi[static_cast<std::size_t>(n - j)] * v[static_cast<std::size_t>(j)];
        const double cq = c.kappa * std::pow(tau, c.abar);
        Eigen::MatrixXd A;
        Eigen::VectorXd b;
        if (n == 1) {
            A = d.M / tau + cq * chi[0] * d.S;
            b = F + d.M * v[0] / tau - cq * d.S * hist;
        } else {
            A = 1.5 * d.M / tau + cq * chi[0] * d.S;
            b = F + d.M * (2 * v[static_cast<std::size_t>(n - 1)] - 0.5 * v[static_cast<std::size_t>(n - 2)]) / tau -
                cq * d.S * hist;
        }
        v[static_cast<std::size_t>(n)] = A.partialPivLu().solve(b);
    }
    for (auto& x : v) x += d.ritz_u0;
    return v;
}

/// All states of the midpoint / averaged product-integration scheme, U^0 = Ritz(u0).
inline std::vector<Eigen::VectorXd> constant_order_midpoint_pi(const ConstantOrderSetup& c) {
    const DenseFem d = dense_fem(c.J);
    const double tau = c.T / c.N;
    const double g2 = std::tgamma(c.abar + 2);
    auto B = [&](double s) { return s > 0 ? std::pow(s, c.abar + 1) / g2 : 0.0; };
    auto weight = [&](int n, int j) {
        if (j == n) return B(tau) / tau;
        const double tn = n * tau, tn1 = (n - 1) * tau, tj = j * tau, tj1 = (j - 1) * tau;
        return (B(tn - tj1) - B(tn - tj) - B(tn1 - tj1) + B(tn1 - tj)) / tau;
    };
    std::vector<Eigen::VectorXd> U(static_cast<std::size_t>(c.N) + 1);
    U[0] = d.ritz_u0;
    for (int n = 1; n <= c.N; ++n) {
        const Eigen::VectorXd Fbar = (B(n * tau) - B((n - 1) * tau)) / tau * d.f_load + d.ubar0_load;
        Eigen::MatrixXd A;
        Eigen::VectorXd b = Fbar + d.M * U[static_cast<std::size_t>(n - 1)] / tau;
        if (n == 1) {
            A = d.M / tau + c.kappa * weight(1, 1) * d.S;
        } else {
            A = d.M / tau + 0.5 * c.kappa * weight(n, n) * d.S;
            Eigen::VectorXd known = weight(n, 1) * U[1] + 0.5 * weight(n, n) * U[static_cast<std::size_t>(n - 1)];
            for (int j = 2; j < n; ++j) {
                known += weight(n, j) * 0.5 * (U[static_cast<std::size_t>(j)] + U[static_cast<std::size_t>(j - 1)]);
            }
            b -= c.kappa * d.S * known;
        }
        U[static_cast<std::size_t>(n)] = A.partialPivLu().solve(b);
    }
    return U;
}

}  // namespace oracle
