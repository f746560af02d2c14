#include "vfdw/special.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "vfdw/error.hpp"

namespace vfdw {

double gamma_fn(double x) { return std::tgamma(x); }

double beta_fn(double a, double b) {
    return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

double beta_kernel(double mu, double t) {
    if (t <= 0.0) return 0.0;
    return std::pow(t, mu - 1.0) / std::tgamma(mu);
}

namespace {

// Golub-Welsch for a symmetric tridiagonal Jacobi matrix; mu0 is the total mass of the weight.
QuadratureRule golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& offdiag, double mu0) {
    const auto n = diag.size();
    QuadratureRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    if (n == 1) {
        rule.nodes[0] = diag[0];
        rule.weights[0] = mu0;
        return rule;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, offdiag, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        throw Error(Stage::exponent,
                    "tridiagonal eigensolver did not converge for a " + std::to_string(n) + "-point rule");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        const double v0 = solver.eigenvectors()(0, i);
        rule.nodes[static_cast<std::size_t>(i)] = solver.eigenvalues()[i];
        rule.weights[static_cast<std::size_t>(i)] = mu0 * v0 * v0;
    }
    return rule;
}

}  // namespace

QuadratureRule gauss_jacobi_rule(int n, double a, double b) {
    if (n < 1) throw Error(Stage::exponent, "gauss_jacobi_rule: need n >= 1");
    if (!(a > -1.0) || !(b > -1.0)) throw Error(Stage::exponent, "gauss_jacobi_rule: exponents must exceed -1");

    // Recurrence of P^(a,b) on [-1,1] with weight (1-x)^a (1+x)^b, shifted by z = (1+x)/2.
    Eigen::VectorXd diag(n);
    Eigen::VectorXd offdiag(n > 1 ? n - 1 : 0);
    const double ab = a + b;
    diag[0] = 0.5 * (1.0 + (b - a) / (ab + 2.0));
    for (int k = 1; k < n; ++k) {
        const double s = 2.0 * k + ab;
        diag[k] = 0.5 * (1.0 + (b * b - a * a) / (s * (s + 2.0)));
    }
    for (int k = 1; k < n; ++k) {
        const double s = 2.0 * k + ab;
        double beta2;
        if (k == 1) {
            // the generic formula is 0/0 when a + b = -1
            beta2 = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
        } else {
            beta2 = 4.0 * k * (k + a) * (k + b) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0));
        }
        offdiag[k - 1] = 0.5 * std::sqrt(beta2);
    }
    return golub_welsch(diag, offdiag, beta_fn(a + 1.0, b + 1.0));
}

QuadratureRule gauss_legendre_rule(int n) { return gauss_jacobi_rule(n, 0.0, 0.0); }

}  // namespace vfdw
