#pragma once

#include <array>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "vfdw/special.hpp"

namespace vfdw {

enum class ExponentKind {
    constant,
    poly_offset,  // alpha0 + c t^p
    sine_offset,  // alpha0 + a sin(t)
    transition,   // a(t; z1, z2) over [0, length], held at z1 afterwards
    smoothed,     // alpha0 on [0, sigma], Hermite blend on [sigma, 2 sigma], base afterwards
};

/// A variable order alpha(t) in (1,2) on [0, horizon], drawn from a closed family with
/// analytic derivatives up to third order. Immutable; cheap to copy.
class ExponentFunction {
public:
    static ExponentFunction constant(double alpha0, double horizon);
    static ExponentFunction poly_offset(double alpha0, double c, double p, double horizon);
    static ExponentFunction sine_offset(double alpha0, double amplitude, double horizon);
    /// z1 + (z2 - z1)(1 - t/L - sin(2 pi (1 - t/L)) / (2 pi)) for t <= L, z1 beyond.
    static ExponentFunction transition(double z1, double z2, double length, double horizon);

    ExponentKind kind() const { return kind_; }
    double alpha0() const { return alpha0_; }
    /// alpha0 - 1, the order of the fractional integral in the transformed model.
    double abar() const { return alpha0_ - 1.0; }
    double horizon() const { return horizon_; }
    const std::array<double, 4>& params() const { return params_; }

    double value(double t) const;
    double operator()(double t) const { return value(t); }
    /// d^order alpha / dt^order for order in {0,1,2,3}.
    double derivative(double t, int order) const;

    /// Interior times where alpha is only finitely smooth (family junctions).
    std::vector<double> breakpoints() const;

    std::string describe() const;

private:
    friend ExponentFunction smooth_exponent(const ExponentFunction& f, double sigma);

    ExponentFunction() = default;
    void finalize();

    ExponentKind kind_ = ExponentKind::constant;
    double alpha0_ = 1.5;
    double horizon_ = 1.0;
    std::array<double, 4> params_{};
    // smoothed kind only: base function and the degree-7 blend s^4 (c0 + c1 s + c2 s^2 + c3 s^3)
    std::shared_ptr<const ExponentFunction> base_;
    std::array<double, 4> blend_{};
};

ExponentFunction make_transition_exponent(double z1, double z2, double T);

/// alpha_sigma: alpha0 on [0,sigma], f on [2 sigma, T], and on [sigma, 2 sigma] the degree-7
/// polynomial matching value and three derivatives at both ends. alpha_sigma'(0) = alpha_sigma''(0) = 0.
ExponentFunction smooth_exponent(const ExponentFunction& f, double sigma);

/// Quadrature for the generalized identity function
///   g(t) = int_0^1 (tz)^(a0 - alpha(tz)) / (Gamma(a0-1) Gamma(2-alpha(tz))) (1-z)^(a0-2) z^(1-a0) dz.
///
/// The interval is split into panels graded geometrically towards z = 0: the innermost panel
/// carries the z^(1-a0) factor in a Gauss-Jacobi rule, the panel [1/2, 1] carries (1-z)^(a0-2)
/// in another, and the interior panels use Gauss-Legendre. Per-panel node counts double until
/// successive values agree to rel_tol. Rules are built lazily and shared; the object is safe
/// for concurrent use.
class GQuadrature {
public:
    static constexpr int max_levels = 12;

    explicit GQuadrature(double alpha0, int node_count = 8, double rel_tol = 1e-12, int max_nodes = 512);

    GQuadrature(const GQuadrature&) = delete;
    GQuadrature& operator=(const GQuadrature&) = delete;

    double alpha0() const { return alpha0_; }
    int node_count() const { return node_count_; }
    double rel_tol() const { return rel_tol_; }
    int max_nodes() const { return max_nodes_; }

    /// Geometric grading depth used with n nodes per panel.
    static int grading_depth(int nodes_per_panel);

    struct PanelRules {
        QuadratureRule left;      // weight z^(1-a0) on (0,1)
        QuadratureRule right;     // weight (1-z)^(a0-2) on (0,1)
        QuadratureRule interior;  // Gauss-Legendre on (0,1)
    };
    const PanelRules& rules(int nodes_per_panel) const;

    /// Integral of (1-z)^(a0-2) z^(1-a0) phi(z) over (0,1) with the composite rule at a
    /// fixed per-panel node count; extra_breaks are additional panel edges in (0,1).
    double integrate(const std::function<double(double)>& phi, int nodes_per_panel,
                     const std::vector<double>& extra_breaks) const;

private:
    double alpha0_;
    int node_count_;
    double rel_tol_;
    int max_nodes_;
    mutable std::array<std::once_flag, max_levels> once_;
    mutable std::array<std::unique_ptr<PanelRules>, max_levels> levels_;
};

/// g(t) for the given exponent; g(0) = 1. Throws Error(Stage::exponent) if node doubling
/// reaches q.max_nodes() without agreement.
double eval_g(const ExponentFunction& f, double t, const GQuadrature& q);

/// Sum of the bare Jacobi-weight quadrature weights at a given per-panel node count
/// (approximates B(a0-1, 2-a0)).
double g_weight_mass(const GQuadrature& q, int nodes_per_panel);

}  // namespace vfdw
