#include "vfdw/weights.hpp"

#include <cmath>

#include "vfdw/error.hpp"

namespace vfdw {

namespace {

void require_abar(double abar) {
    if (!(abar > 0.0 && abar < 1.0)) throw Error(Stage::weights, "abar must lie in (0,1)");
}

// (m+1)^p - 2 m^p + (m-1)^p for p in (1,2), without cancellation for large m.
double second_difference_power(int m, double p) {
    if (m < 8) {
        const double md = m;
        return std::pow(md + 1.0, p) - 2.0 * std::pow(md, p) + std::pow(md - 1.0, p);
    }
    // m^p [(1+x)^p + (1-x)^p - 2] = 2 m^p sum_{k>=1} binom(p, 2k) x^(2k), x = 1/m
    const double x2 = 1.0 / (static_cast<double>(m) * m);
    double binom = 1.0;  // binom(p, j)
    double xpow = 1.0;
    double sum = 0.0;
    for (int j = 1; j <= 80; ++j) {
        binom *= (p - (j - 1)) / j;
        if (j % 2 == 1) continue;
        xpow *= x2;
        const double term = binom * xpow;
        sum += term;
        if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
    }
    return 2.0 * std::pow(static_cast<double>(m), p) * sum;
}

}  // namespace

std::vector<double> g_table(const ExponentFunction& f, const GQuadrature& q, int N, double tau) {
    if (N < 1 || !(tau > 0.0)) throw Error(Stage::weights, "g_table: need N >= 1 and tau > 0");
    std::vector<double> g(static_cast<std::size_t>(N) + 1);
    for (int k = 0; k <= N; ++k) g[static_cast<std::size_t>(k)] = eval_g(f, k * tau, q);
    return g;
}

std::vector<double> kernel_increments(const std::vector<double>& g_values) {
    if (g_values.size() < 2) throw Error(Stage::weights, "kernel_increments: need at least two g values");
    std::vector<double> w(g_values.size() - 1);
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = g_values[k + 1] - g_values[k];
    return w;
}

std::vector<double> kernel_increments(const ExponentFunction& f, const GQuadrature& q, int N, double tau) {
    return kernel_increments(g_table(f, q, N, tau));
}

std::vector<double> binomial_series(double abar, int count) {
    std::vector<double> c(static_cast<std::size_t>(std::max(count, 0)));
    if (count > 0) c[0] = 1.0;
    for (int n = 1; n < count; ++n) {
        c[static_cast<std::size_t>(n)] = c[static_cast<std::size_t>(n - 1)] * (n - 1 + abar) / n;
    }
    return c;
}

std::vector<double> cq_weights(double abar, int N) {
    require_abar(abar);
    if (N < 1) throw Error(Stage::weights, "cq_weights: need N >= 1");
    const std::vector<double> c = binomial_series(abar, N);

    // 3^-j falls below 1e-22 after 46 terms; c_j <= 1, so later products are below rounding.
    std::vector<double> third_pow;
    for (double p = 1.0; p > 1e-22 && third_pow.size() < static_cast<std::size_t>(N); p /= 3.0) {
        third_pow.push_back(p);
    }

    const double scale = std::pow(2.0 / 3.0, abar);
    std::vector<double> chi(static_cast<std::size_t>(N));
    for (int n = 0; n < N; ++n) {
        const int jmax = std::min<int>(n, static_cast<int>(third_pow.size()) - 1);
        double s = 0.0;
        for (int j = jmax; j >= 0; --j) {
            s += third_pow[static_cast<std::size_t>(j)] * c[static_cast<std::size_t>(n - j)] *
                 c[static_cast<std::size_t>(j)];
        }
        chi[static_cast<std::size_t>(n)] = scale * s;
    }
    return chi;
}

std::vector<double> correction_weights(const std::vector<double>& chi, double abar, int N) {
    require_abar(abar);
    if (chi.size() < static_cast<std::size_t>(N)) throw Error(Stage::weights, "correction_weights: chi too short");
    const double inv_gamma = 1.0 / std::tgamma(abar + 1.0);
    std::vector<double> omega(static_cast<std::size_t>(N) + 1, 0.0);
    // Neumaier-compensated prefix sum of chi_0 .. chi_{n-1}
    double sum = 0.0;
    double comp = 0.0;
    for (int n = 1; n <= N; ++n) {
        const double x = chi[static_cast<std::size_t>(n - 1)];
        const double t = sum + x;
        comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
        sum = t;
        omega[static_cast<std::size_t>(n)] = std::pow(static_cast<double>(n), abar) * inv_gamma - (sum + comp);
    }
    return omega;
}

PiWeights pi_weights(double abar, double tau, int N) {
    require_abar(abar);
    if (!(tau > 0.0) || N < 1) throw Error(Stage::weights, "pi_weights: need tau > 0 and N >= 1");
    const double p = abar + 1.0;
    const double scale = std::pow(tau, abar) / std::tgamma(abar + 2.0);
    PiWeights out;
    out.diag = scale;
    out.off.assign(static_cast<std::size_t>(N), 0.0);
    for (int m = 1; m < N; ++m) out.off[static_cast<std::size_t>(m)] = scale * second_difference_power(m, p);
    return out;
}

WeightTables build_weight_tables(const ExponentFunction& f, const GQuadrature& q, int N, double T) {
    if (N < 1 || !(T > 0.0)) throw Error(Stage::weights, "build_weight_tables: need N >= 1 and T > 0");
    WeightTables tables;
    tables.N = N;
    tables.tau = T / N;
    tables.abar = f.abar();
    tables.g = g_table(f, q, N, tables.tau);
    tables.w = kernel_increments(tables.g);
    tables.chi = cq_weights(tables.abar, N);
    tables.omega_corr = correction_weights(tables.chi, tables.abar, N);
    PiWeights pi = pi_weights(tables.abar, tables.tau, N);
    tables.pi_diag = pi.diag;
    tables.pi_off = std::move(pi.off);
    return tables;
}

}  // namespace vfdw
