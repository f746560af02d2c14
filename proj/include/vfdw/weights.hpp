#pragma once

#include <vector>

#include "vfdw/exponent.hpp"

namespace vfdw {

/// All temporal weights of one run on the uniform grid t_k = k tau, k = 0..N.
struct WeightTables {
    int N = 0;
    double tau = 0.0;
    double abar = 0.0;
    std::vector<double> g;           // g(t_k), k = 0..N
    std::vector<double> w;           // w_k = g(t_{k+1}) - g(t_k), k = 0..N-1
    std::vector<double> chi;         // CQ weights chi_k, k = 0..N-1
    std::vector<double> omega_corr;  // correction weights omega_n at index n = 1..N; entry 0 is 0
    double pi_diag = 0.0;            // averaged-PI weight omega_{n,n}
    std::vector<double> pi_off;      // omega_{n,n-m} by lag m = 1..N-1; entry 0 is 0
};

/// g(k tau) for k = 0..N.
std::vector<double> g_table(const ExponentFunction& f, const GQuadrature& q, int N, double tau);

/// w_k = g((k+1) tau) - g(k tau), k = 0..N-1.
std::vector<double> kernel_increments(const ExponentFunction& f, const GQuadrature& q, int N, double tau);
std::vector<double> kernel_increments(const std::vector<double>& g_values);

/// c_n = (-1)^n binom(-abar, n): Taylor coefficients of (1 - zeta)^(-abar), n = 0..count-1.
std::vector<double> binomial_series(double abar, int count);

/// Second-order CQ weights: coefficients of [(1-zeta)(3-zeta)/2]^(-abar), n = 0..N-1.
std::vector<double> cq_weights(double abar, int N);

/// omega_n = n^abar / Gamma(abar+1) - sum_{j=1}^n chi_{n-j}, returned at index n = 1..N (entry 0 is 0).
std::vector<double> correction_weights(const std::vector<double>& chi, double abar, int N);

struct PiWeights {
    double diag = 0.0;
    std::vector<double> off;  // by lag m = 1..N-1; entry 0 is 0
};

/// Averaged product-integration weights of beta_abar: with B(s) = s^(abar+1)/Gamma(abar+2),
/// diag = B(tau)/tau and off[m] = (B((m+1)tau) - 2B(m tau) + B((m-1)tau))/tau.
PiWeights pi_weights(double abar, double tau, int N);

WeightTables build_weight_tables(const ExponentFunction& f, const GQuadrature& q, int N, double T);

}  // namespace vfdw
