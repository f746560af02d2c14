#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "vfdw/error.hpp"
#include "vfdw/weights.hpp"

using namespace vfdw;

TEST_CASE("kernel increments") {
    const ExponentFunction c = ExponentFunction::constant(1.5, 1.0);
    const GQuadrature qc(1.5);
    for (double w : kernel_increments(c, qc, 32, 1.0 / 32)) CHECK(std::abs(w) < 1e-12);

    const ExponentFunction f = ExponentFunction::poly_offset(1.2, 0.5, 3.0, 1.0);
    const GQuadrature q(1.2);
    const double tau = 1.0 / 64;
    const std::vector<double> w = kernel_increments(f, q, 64, tau);
    auto alpha = [&](double t) { return f.value(t); };
    CHECK(std::abs(w[0] - (oracle::g_value(alpha, tau) - 1.0)) < 1e-10);

    double sum = 0.0;
    for (double x : w) sum += x;
    CHECK(std::abs(sum - (eval_g(f, 1.0, q) - 1.0)) < 1e-13);
}

TEST_CASE("binomial series") {
    for (double abar : {0.2, 0.5, 0.9}) {
        const auto c = binomial_series(abar, 3);
        CHECK(c[0] == 1.0);
        CHECK(std::abs(c[1] - abar) < 1e-16);
        CHECK(std::abs(c[2] - abar * (abar + 1) / 2) < 1e-16);
    }
}

TEST_CASE("cq weights") {
    const auto chi = cq_weights(0.5, 4);
    CHECK(std::abs(chi[0] - std::sqrt(2.0 / 3.0)) < 1e-15);
    CHECK(std::abs(chi[0] - 0.816497) < 1e-6);

    const auto long_chi = cq_weights(0.9, 2001);
    const double r1000 = long_chi[1000] / std::pow(1000.0, -0.1);
    const double r2000 = long_chi[2000] / std::pow(2000.0, -0.1);
    CHECK(std::abs(r1000 / r2000 - 1.0) < 0.05);

    CHECK_THROWS_AS(cq_weights(1.0, 4), Error);
    CHECK_THROWS_AS(cq_weights(0.0, 4), Error);
}

TEST_CASE("generating-function inversion") {
    // [(1-z)(3-z)/2]^abar = (3/2)^abar (1-z)^abar (1-z/3)^abar
    for (double abar : {0.2, 0.5, 0.9}) {
        const int order = 256;
        const auto chi = cq_weights(abar, order + 1);
        std::vector<double> a(order + 1), b(order + 1);
        a[0] = b[0] = 1.0;
        for (int n = 1; n <= order; ++n) {
            a[n] = a[n - 1] * (n - 1 - abar) / n;
            b[n] = b[n - 1] * (n - 1 - abar) / n / 3.0;
        }
        std::vector<double> inv(order + 1, 0.0);
        for (int n = 0; n <= order; ++n)
            for (int j = 0; j <= n; ++j) inv[n] += a[j] * b[n - j];
        for (double& x : inv) x *= std::pow(1.5, abar);
        double worst = 0.0;
        for (int n = 0; n <= order; ++n) {
            double s = 0.0;
            for (int j = 0; j <= n; ++j) s += chi[j] * inv[n - j];
            worst = std::max(worst, std::abs(s - (n == 0 ? 1.0 : 0.0)));
        }
        CHECK(worst <= 1e-10);
    }
}

TEST_CASE("correction weights") {
    const auto chi = cq_weights(0.5, 4);
    const auto om = correction_weights(chi, 0.5, 4);
    CHECK(om[0] == 0.0);
    CHECK(std::abs(om[1] - (1.0 / std::tgamma(1.5) - std::sqrt(2.0 / 3.0))) < 1e-15);
    CHECK(std::abs(om[1] - 0.311882) < 1e-6);

    for (double abar : {0.2, 0.5, 0.9}) {
        const int N = 4096;
        const auto c = cq_weights(abar, N);
        const auto o = correction_weights(c, abar, N);
        double s = 0.0;
        double worst = 0.0;
        for (int n = 1; n <= N; ++n) {
            s += c[n - 1];
            const double target = std::pow(n, abar) / std::tgamma(abar + 1);
            worst = std::max(worst, std::abs(s + o[n] - target) / std::max(1.0, target));
        }
        CHECK(worst <= 1e-12);
    }

    const auto c2 = cq_weights(0.2, 4096);
    const auto o2 = correction_weights(c2, 0.2, 4096);
    double prev = std::abs(o2[16]) / std::pow(16.0, 0.2);
    for (int n : {64, 256, 1024, 4096}) {
        const double r = std::abs(o2[n]) / std::pow(n, 0.2);
        CHECK(r < prev);
        prev = r;
    }
}

TEST_CASE("averaged PI weights") {
    const PiWeights p = pi_weights(0.5, 0.1, 4);
    CHECK(std::abs(p.diag - std::sqrt(0.1) / std::tgamma(2.5)) < 1e-15);
    CHECK(std::abs(p.diag - 0.237883) < 1e-6);
    CHECK(std::abs(p.diag - oracle::averaged_pi_weight(0.5, 0.1, 3, 3)) < 1e-10);

    const PiWeights q = pi_weights(0.5, 0.25, 16);
    for (int m : {1, 2, 7}) {
        const double ref = oracle::averaged_pi_weight(0.5, 0.25, 10, 10 - m);
        CHECK(std::abs(q.off[m] - ref) < 1e-10);
    }
    const PiWeights q3 = pi_weights(0.3, 0.25, 16);
    CHECK(std::abs(q3.off[3] - oracle::averaged_pi_weight(0.3, 0.25, 5, 2)) < 1e-10);

    for (double abar : {0.1, 0.5, 0.9}) {
        const double tau = 1.0 / 1000;
        const PiWeights w = pi_weights(abar, tau, 1000);
        CHECK(w.diag > 0.0);
        for (int m = 1; m < 1000; ++m) {
            CHECK(w.off[m] > 0.0);
            if (m > 1) CHECK(w.off[m] < w.off[m - 1]);
        }
        auto B = [&](double s) { return std::pow(s, abar + 1) / std::tgamma(abar + 2); };
        double worst = 0.0;
        for (int n = 1; n <= 1000; ++n) {
            double s = w.diag;
            for (int m = 1; m < n; ++m) s += w.off[m];
            const double target = (B(n * tau) - B((n - 1) * tau)) / tau;
            worst = std::max(worst, std::abs(s - target));
        }
        CHECK(worst <= 1e-12);
    }
}

TEST_CASE("weight tables") {
    const ExponentFunction f = ExponentFunction::sine_offset(1.4, 0.125, 1.0);
    const GQuadrature q(1.4);
    const WeightTables t = build_weight_tables(f, q, 64, 1.0);
    CHECK(t.N == 64);
    CHECK(t.tau == 1.0 / 64);
    CHECK(std::abs(t.abar - 0.4) < 1e-15);
    CHECK(t.g.size() == 65);
    CHECK(t.w.size() == 64);
    CHECK(t.chi.size() == 64);
    CHECK(t.omega_corr.size() == 65);
    CHECK(t.pi_off.size() == 64);
    CHECK(t.g[0] == 1.0);
    CHECK(std::abs(t.w[0]) < 1.0);
}
