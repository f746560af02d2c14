#pragma once

#include <vector>

namespace vfdw {

double gamma_fn(double x);
double beta_fn(double a, double b);

/// beta_mu(t) = t^(mu-1) / Gamma(mu), the fractional-integral kernel (zero for t <= 0).
double beta_kernel(double mu, double t);

/// Nodes and weights of a rule on (0,1): int_0^1 phi(z) w(z) dz ~ sum_i weights[i] * phi(nodes[i]).
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }
};

/// Gauss-Jacobi rule for the weight (1-z)^a z^b on (0,1), via Golub-Welsch on the
/// shifted Jacobi recurrence. Exact for polynomials of degree <= 2n-1.
QuadratureRule gauss_jacobi_rule(int n, double a, double b);

/// Gauss-Legendre rule on (0,1).
QuadratureRule gauss_legendre_rule(int n);

}  // namespace vfdw
