#pragma once

#include <array>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

namespace vfdw {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Interval [x0, x1] (dim 1) or rectangle [x0, x1] x [y0, y1] (dim 2).
struct Domain {
    int dim = 1;
    std::array<double, 2> x{0.0, 1.0};
    std::array<double, 2> y{0.0, 1.0};
};

/// Uniform grid with J subdivisions per axis; degrees of freedom are the interior nodes,
/// numbered x-fastest: dof = (j-1)(J-1) + (i-1) for node (i, j).
struct Mesh {
    Domain domain;
    int J = 2;
    double hx = 0.5;
    double hy = 0.5;

    int dim() const { return domain.dim; }
    int interior_per_axis() const { return J - 1; }
    int dofs() const { return dim() == 1 ? J - 1 : (J - 1) * (J - 1); }
    double x_node(int i) const { return domain.x[0] + i * hx; }
    double y_node(int j) const { return domain.y[0] + j * hy; }
};

Mesh make_mesh(const Domain& domain, int J);

using ScalarField = std::function<double(double x, double y)>;
using GradientField = std::function<std::array<double, 2>(double x, double y)>;

/// Initial datum or source profile. In 1D the y argument is 0 and the y gradient unused.
struct SpatialFunction {
    ScalarField value;
    GradientField gradient;  // empty when unavailable
    bool nodal_only = false;  // not in H^1_0: enters the scheme by nodal interpolation

    /// The zero function is the one without a value callable.
    static SpatialFunction zero() { return {}; }
    bool is_zero() const { return !value; }
};

/// Piecewise linear (1D) or bilinear (2D) Lagrange space on a uniform mesh with
/// homogeneous Dirichlet conditions. Mass and stiffness matrices act on interior dofs.
class FemSpace {
public:
    explicit FemSpace(const Mesh& mesh);

    const Mesh& mesh() const { return mesh_; }
    int size() const { return mesh_.dofs(); }
    const SparseMatrix& mass() const { return mass_; }
    const SparseMatrix& stiffness() const { return stiffness_; }
    /// 1D factors along x; the 2D matrices are Kronecker combinations of these.
    const SparseMatrix& mass_1d() const { return mass_1d_; }
    const SparseMatrix& stiffness_1d() const { return stiffness_1d_; }

    std::array<double, 2> dof_coordinates(int dof) const;

    Vector interpolate(const ScalarField& f) const;
    /// (f, chi_i) with 4-point Gauss-Legendre per element per axis.
    Vector load(const ScalarField& f) const;
    /// (grad u, grad chi_i) with the same quadrature.
    Vector gradient_load(const GradientField& grad) const;

    /// Ritz projection: S x = (grad u, grad chi_i).
    Vector ritz_project(const GradientField& grad) const;
    /// Ritz projection when a gradient is available and the datum is not flagged nodal_only,
    /// otherwise nodal interpolation at interior nodes.
    Vector initial_coefficients(const SpatialFunction& u) const;
    /// (u, chi_i): quadrature load for smooth data, M * nodal values for nodal_only data.
    Vector data_load(const SpatialFunction& u) const;
    /// (grad u, grad chi_i), or S * nodal values for nodal_only data.
    Vector stiffness_load(const SpatialFunction& u) const;

    double mass_inner(const Vector& u, const Vector& v) const;
    double mass_norm(const Vector& u) const;
    /// (h sum |u_j|^2)^(1/2) in 1D, (hx hy sum |u_ij|^2)^(1/2) in 2D.
    double lumped_norm(const Vector& u) const;

private:
    void check_size(const Vector& u) const;

    Mesh mesh_;
    SparseMatrix mass_1d_;
    SparseMatrix stiffness_1d_;
    SparseMatrix mass_;
    SparseMatrix stiffness_;
};

enum class SpdMethod { automatic, tridiagonal, cholesky, conjugate_gradient };

/// Solve A x = b for symmetric positive definite A to relative residual 1e-12.
/// automatic picks tridiagonal elimination for tridiagonal A and sparse Cholesky otherwise.
Vector solve_spd(const SparseMatrix& A, const Vector& b, SpdMethod method = SpdMethod::automatic);

struct CgResult {
    Vector x;
    int iterations = 0;
    double relative_residual = 0.0;
};

/// Jacobi-preconditioned conjugate gradients; throws Error(Stage::solve) past max_iterations.
CgResult conjugate_gradient(const SparseMatrix& A, const Vector& b, double rel_tol = 1e-12, int max_iterations = 0);

/// LDL^T of a symmetric tridiagonal matrix.
class TridiagonalFactor {
public:
    explicit TridiagonalFactor(const SparseMatrix& A);
    Vector solve(const Vector& b) const;

private:
    std::vector<double> d_;
    std::vector<double> l_;
};

/// Factorization of mass_coeff * M + stiff_coeff * S, reused across time steps.
class SpdFactorization {
public:
    SpdFactorization(const FemSpace& space, double mass_coeff, double stiff_coeff);
    SpdFactorization(const SparseMatrix& A);

    Vector solve(const Vector& b) const;
    const SparseMatrix& matrix() const { return matrix_; }

private:
    void factor();

    SparseMatrix matrix_;
    double matrix_inf_norm_ = 0.0;
    std::unique_ptr<TridiagonalFactor> tridiagonal_;
    std::unique_ptr<Eigen::SimplicialLLT<SparseMatrix>> cholesky_;
};

}  // namespace vfdw
