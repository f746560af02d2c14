#include "vfdw/fem.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>

#include "vfdw/error.hpp"
#include "vfdw/special.hpp"

namespace vfdw {

namespace {

using Triplet = Eigen::Triplet<double>;

SparseMatrix tridiagonal(int n, double diag, double off) {
    std::vector<Triplet> entries;
    entries.reserve(static_cast<std::size_t>(3 * n));
    for (int i = 0; i < n; ++i) {
        entries.emplace_back(i, i, diag);
        if (i + 1 < n) {
            entries.emplace_back(i, i + 1, off);
            entries.emplace_back(i + 1, i, off);
        }
    }
    SparseMatrix m(n, n);
    m.setFromTriplets(entries.begin(), entries.end());
    return m;
}

// 4-point Gauss-Legendre on (0,1)
const QuadratureRule& element_rule() {
    static const QuadratureRule rule = gauss_legendre_rule(4);
    return rule;
}

bool is_tridiagonal(const SparseMatrix& A) {
    for (int k = 0; k < A.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(A, k); it; ++it) {
            if (std::abs(it.row() - it.col()) > 1 && it.value() != 0.0) return false;
        }
    }
    return true;
}

double relative_residual(const SparseMatrix& A, const Vector& x, const Vector& b) {
    const double bn = b.norm();
    if (bn == 0.0) return (A * x).norm();
    return (A * x - b).norm() / bn;
}

// normwise backward error |b - A x|_inf / (|A|_inf |x|_inf + |b|_inf)
double backward_error(const SparseMatrix& A, double a_norm, const Vector& x, const Vector& b) {
    const double scale = a_norm * x.lpNorm<Eigen::Infinity>() + b.lpNorm<Eigen::Infinity>();
    if (scale == 0.0) return 0.0;
    return (A * x - b).lpNorm<Eigen::Infinity>() / scale;
}

constexpr double backward_tolerance = 1e-12;

}  // namespace

Mesh make_mesh(const Domain& domain, int J) {
    if (domain.dim != 1 && domain.dim != 2) throw Error(Stage::assembly, "mesh dimension must be 1 or 2");
    if (J < 2) throw Error(Stage::assembly, "mesh needs J >= 2 subdivisions");
    if (!(domain.x[1] > domain.x[0]) || (domain.dim == 2 && !(domain.y[1] > domain.y[0]))) {
        throw Error(Stage::assembly, "empty domain");
    }
    Mesh mesh;
    mesh.domain = domain;
    mesh.J = J;
    mesh.hx = (domain.x[1] - domain.x[0]) / J;
    mesh.hy = domain.dim == 2 ? (domain.y[1] - domain.y[0]) / J : 0.0;
    return mesh;
}

FemSpace::FemSpace(const Mesh& mesh) : mesh_(mesh) {
    const int n = mesh.interior_per_axis();
    const double h = mesh.hx;
    mass_1d_ = tridiagonal(n, 4.0 * h / 6.0, h / 6.0);
    stiffness_1d_ = tridiagonal(n, 2.0 / h, -1.0 / h);
    if (mesh.dim() == 1) {
        mass_ = mass_1d_;
        stiffness_ = stiffness_1d_;
    } else {
        const double hy = mesh.hy;
        const SparseMatrix mass_y = tridiagonal(n, 4.0 * hy / 6.0, hy / 6.0);
        const SparseMatrix stiffness_y = tridiagonal(n, 2.0 / hy, -1.0 / hy);
        // x varies fastest, so the y factor is the outer Kronecker operand
        mass_ = Eigen::kroneckerProduct(mass_y, mass_1d_).eval();
        SparseMatrix sx = Eigen::kroneckerProduct(mass_y, stiffness_1d_).eval();
        SparseMatrix sy = Eigen::kroneckerProduct(stiffness_y, mass_1d_).eval();
        stiffness_ = sx + sy;
    }
    mass_.makeCompressed();
    stiffness_.makeCompressed();
}

std::array<double, 2> FemSpace::dof_coordinates(int dof) const {
    const int n = mesh_.interior_per_axis();
    if (mesh_.dim() == 1) return {mesh_.x_node(dof + 1), 0.0};
    return {mesh_.x_node(dof % n + 1), mesh_.y_node(dof / n + 1)};
}

Vector FemSpace::interpolate(const ScalarField& f) const {
    Vector out(size());
    for (int d = 0; d < size(); ++d) {
        const auto p = dof_coordinates(d);
        out[d] = f(p[0], p[1]);
    }
    return out;
}

Vector FemSpace::load(const ScalarField& f) const {
    const QuadratureRule& q = element_rule();
    const int J = mesh_.J;
    const int n = mesh_.interior_per_axis();
    Vector out = Vector::Zero(size());
    if (mesh_.dim() == 1) {
        const double h = mesh_.hx;
        for (int e = 0; e < J; ++e) {
            const double x0 = mesh_.x_node(e);
            double left = 0.0;
            double right = 0.0;
            for (std::size_t g = 0; g < q.size(); ++g) {
                const double s = q.nodes[g];
                const double fx = f(x0 + s * h, 0.0) * q.weights[g] * h;
                left += fx * (1.0 - s);
                right += fx * s;
            }
            if (e >= 1) out[e - 1] += left;
            if (e + 1 <= n) out[e] += right;
        }
        return out;
    }
    const double hx = mesh_.hx;
    const double hy = mesh_.hy;
    for (int ey = 0; ey < J; ++ey) {
        for (int ex = 0; ex < J; ++ex) {
            const double x0 = mesh_.x_node(ex);
            const double y0 = mesh_.y_node(ey);
            double local[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
            for (std::size_t gy = 0; gy < q.size(); ++gy) {
                const double t = q.nodes[gy];
                for (std::size_t gx = 0; gx < q.size(); ++gx) {
                    const double s = q.nodes[gx];
                    const double fw = f(x0 + s * hx, y0 + t * hy) * q.weights[gx] * q.weights[gy] * hx * hy;
                    local[0][0] += fw * (1.0 - s) * (1.0 - t);
                    local[0][1] += fw * s * (1.0 - t);
                    local[1][0] += fw * (1.0 - s) * t;
                    local[1][1] += fw * s * t;
                }
            }
            for (int b = 0; b < 2; ++b) {
                for (int a = 0; a < 2; ++a) {
                    const int i = ex + a;
                    const int j = ey + b;
                    if (i >= 1 && i <= n && j >= 1 && j <= n) out[(j - 1) * n + (i - 1)] += local[b][a];
                }
            }
        }
    }
    return out;
}

Vector FemSpace::gradient_load(const GradientField& grad) const {
    if (!grad) throw Error(Stage::assembly, "gradient_load: no gradient supplied");
    const QuadratureRule& q = element_rule();
    const int J = mesh_.J;
    const int n = mesh_.interior_per_axis();
    Vector out = Vector::Zero(size());
    if (mesh_.dim() == 1) {
        const double h = mesh_.hx;
        for (int e = 0; e < J; ++e) {
            const double x0 = mesh_.x_node(e);
            double integral = 0.0;
            for (std::size_t g = 0; g < q.size(); ++g) {
                integral += grad(x0 + q.nodes[g] * h, 0.0)[0] * q.weights[g] * h;
            }
            // basis slopes are -1/h (left node) and +1/h (right node)
            if (e >= 1) out[e - 1] -= integral / h;
            if (e + 1 <= n) out[e] += integral / h;
        }
        return out;
    }
    const double hx = mesh_.hx;
    const double hy = mesh_.hy;
    for (int ey = 0; ey < J; ++ey) {
        for (int ex = 0; ex < J; ++ex) {
            const double x0 = mesh_.x_node(ex);
            const double y0 = mesh_.y_node(ey);
            double local[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
            for (std::size_t gy = 0; gy < q.size(); ++gy) {
                const double t = q.nodes[gy];
                for (std::size_t gx = 0; gx < q.size(); ++gx) {
                    const double s = q.nodes[gx];
                    const auto gu = grad(x0 + s * hx, y0 + t * hy);
                    const double w = q.weights[gx] * q.weights[gy] * hx * hy;
                    // bilinear basis gradients at (s,t)
                    const double phi_x[2][2] = {{-(1.0 - t) / hx, (1.0 - t) / hx}, {-t / hx, t / hx}};
                    const double phi_y[2][2] = {{-(1.0 - s) / hy, -s / hy}, {(1.0 - s) / hy, s / hy}};
                    for (int b = 0; b < 2; ++b) {
                        for (int a = 0; a < 2; ++a) {
                            local[b][a] += w * (gu[0] * phi_x[b][a] + gu[1] * phi_y[b][a]);
                        }
                    }
                }
            }
            for (int b = 0; b < 2; ++b) {
                for (int a = 0; a < 2; ++a) {
                    const int i = ex + a;
                    const int j = ey + b;
                    if (i >= 1 && i <= n && j >= 1 && j <= n) out[(j - 1) * n + (i - 1)] += local[b][a];
                }
            }
        }
    }
    return out;
}

Vector FemSpace::ritz_project(const GradientField& grad) const {
    return solve_spd(stiffness_, gradient_load(grad));
}

Vector FemSpace::initial_coefficients(const SpatialFunction& u) const {
    if (u.is_zero()) return Vector::Zero(size());
    if (!u.nodal_only && u.gradient) return ritz_project(u.gradient);
    return interpolate(u.value);
}

Vector FemSpace::data_load(const SpatialFunction& u) const {
    if (u.is_zero()) return Vector::Zero(size());
    if (u.nodal_only) return mass_ * interpolate(u.value);
    return load(u.value);
}

Vector FemSpace::stiffness_load(const SpatialFunction& u) const {
    if (u.is_zero()) return Vector::Zero(size());
    if (u.nodal_only || !u.gradient) return stiffness_ * interpolate(u.value);
    return gradient_load(u.gradient);
}

void FemSpace::check_size(const Vector& u) const {
    if (u.size() != size()) {
        std::ostringstream msg;
        msg << "nodal field has " << u.size() << " entries, space has " << size();
        throw Error(Stage::assembly, msg.str());
    }
}

double FemSpace::mass_inner(const Vector& u, const Vector& v) const {
    check_size(u);
    check_size(v);
    return u.dot(mass_ * v);
}

double FemSpace::mass_norm(const Vector& u) const { return std::sqrt(mass_inner(u, u)); }

double FemSpace::lumped_norm(const Vector& u) const {
    check_size(u);
    const double cell = mesh_.dim() == 1 ? mesh_.hx : mesh_.hx * mesh_.hy;
    double sum = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) sum += u[i] * u[i];
    return std::sqrt(cell * sum);
}

// ---------------------------------------------------------------------------

TridiagonalFactor::TridiagonalFactor(const SparseMatrix& A) {
    const auto n = static_cast<std::size_t>(A.rows());
    if (A.rows() != A.cols() || n == 0) throw Error(Stage::solve, "tridiagonal factor needs a square matrix");
    d_.assign(n, 0.0);
    l_.assign(n, 0.0);
    std::vector<double> diag(n, 0.0);
    std::vector<double> sub(n, 0.0);
    for (int k = 0; k < A.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(A, k); it; ++it) {
            if (it.row() == it.col()) diag[static_cast<std::size_t>(it.row())] = it.value();
            if (it.row() == it.col() + 1) sub[static_cast<std::size_t>(it.row())] = it.value();
        }
    }
    d_[0] = diag[0];
    for (std::size_t i = 1; i < n; ++i) {
        if (!(d_[i - 1] > 0.0)) throw Error(Stage::solve, "tridiagonal matrix is not positive definite");
        l_[i] = sub[i] / d_[i - 1];
        d_[i] = diag[i] - l_[i] * sub[i];
    }
    if (!(d_[n - 1] > 0.0)) throw Error(Stage::solve, "tridiagonal matrix is not positive definite");
}

Vector TridiagonalFactor::solve(const Vector& b) const {
    const auto n = d_.size();
    Vector x = b;
    for (std::size_t i = 1; i < n; ++i) x[static_cast<Eigen::Index>(i)] -= l_[i] * x[static_cast<Eigen::Index>(i - 1)];
    for (std::size_t i = 0; i < n; ++i) x[static_cast<Eigen::Index>(i)] /= d_[i];
    for (std::size_t i = n - 1; i-- > 0;) {
        x[static_cast<Eigen::Index>(i)] -= l_[i + 1] * x[static_cast<Eigen::Index>(i + 1)];
    }
    return x;
}

SpdFactorization::SpdFactorization(const FemSpace& space, double mass_coeff, double stiff_coeff) {
    if (!(mass_coeff > 0.0) || !(stiff_coeff >= 0.0)) {
        std::ostringstream msg;
        msg << "system matrix " << mass_coeff << " M + " << stiff_coeff << " S is not SPD";
        throw Error(Stage::solve, msg.str());
    }
    matrix_ = mass_coeff * space.mass() + stiff_coeff * space.stiffness();
    factor();
}

SpdFactorization::SpdFactorization(const SparseMatrix& A) : matrix_(A) { factor(); }

void SpdFactorization::factor() {
    matrix_.makeCompressed();
    Vector row_sums = Vector::Zero(matrix_.rows());
    for (Eigen::Index k = 0; k < matrix_.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(matrix_, k); it; ++it) row_sums[it.row()] += std::abs(it.value());
    }
    matrix_inf_norm_ = row_sums.size() ? row_sums.maxCoeff() : 0.0;
    if (is_tridiagonal(matrix_)) {
        tridiagonal_ = std::make_unique<TridiagonalFactor>(matrix_);
        return;
    }
    cholesky_ = std::make_unique<Eigen::SimplicialLLT<SparseMatrix>>(matrix_);
    if (cholesky_->info() != Eigen::Success) throw Error(Stage::solve, "sparse Cholesky factorization failed");
}

Vector SpdFactorization::solve(const Vector& b) const {
    if (b.size() != matrix_.rows()) throw Error(Stage::solve, "right-hand side has the wrong size");
    auto apply = [&](const Vector& r) -> Vector {
        return tridiagonal_ ? tridiagonal_->solve(r) : Vector(cholesky_->solve(r));
    };
    Vector x = apply(b);
    double err = backward_error(matrix_, matrix_inf_norm_, x, b);
    if (err > backward_tolerance) {
        x += apply(b - matrix_ * x);
        err = backward_error(matrix_, matrix_inf_norm_, x, b);
        if (err > backward_tolerance) {
            std::ostringstream msg;
            msg << "direct solve left backward error " << err;
            throw Error(Stage::solve, msg.str());
        }
    }
    return x;
}

CgResult conjugate_gradient(const SparseMatrix& A, const Vector& b, double rel_tol, int max_iterations) {
    const auto n = A.rows();
    if (max_iterations <= 0) max_iterations = static_cast<int>(10 * n + 100);
    CgResult out;
    out.x = Vector::Zero(n);
    const double bn = b.norm();
    if (bn == 0.0) return out;
    const Vector inv_diag = A.diagonal().cwiseInverse();
    Vector r = b;
    Vector z = inv_diag.cwiseProduct(r);
    Vector p = z;
    double rz = r.dot(z);
    for (int it = 1; it <= max_iterations; ++it) {
        const Vector Ap = A * p;
        const double alpha = rz / p.dot(Ap);
        out.x += alpha * p;
        r -= alpha * Ap;
        out.iterations = it;
        out.relative_residual = r.norm() / bn;
        if (out.relative_residual <= rel_tol) {
            // recompute the true residual to guard against drift in the recursive one
            out.relative_residual = relative_residual(A, out.x, b);
            if (out.relative_residual <= rel_tol) return out;
            r = b - A * out.x;
        }
        z = inv_diag.cwiseProduct(r);
        const double rz_next = r.dot(z);
        p = z + (rz_next / rz) * p;
        rz = rz_next;
    }
    std::ostringstream msg;
    msg << "conjugate gradients stopped after " << max_iterations << " iterations at relative residual "
        << out.relative_residual;
    throw Error(Stage::solve, msg.str());
}

Vector solve_spd(const SparseMatrix& A, const Vector& b, SpdMethod method) {
    if (A.rows() != A.cols() || A.rows() != b.size()) throw Error(Stage::solve, "solve_spd: dimension mismatch");
    switch (method) {
        case SpdMethod::conjugate_gradient:
            return conjugate_gradient(A, b).x;
        case SpdMethod::tridiagonal:
            if (!is_tridiagonal(A)) throw Error(Stage::solve, "solve_spd: matrix is not tridiagonal");
            return SpdFactorization(A).solve(b);
        case SpdMethod::cholesky: {
            Eigen::SimplicialLLT<SparseMatrix> llt(A);
            if (llt.info() != Eigen::Success) throw Error(Stage::solve, "sparse Cholesky factorization failed");
            Vector x = llt.solve(b);
            x += llt.solve(Vector(b - A * x));  // one refinement step
            return x;
        }
        case SpdMethod::automatic:
            return SpdFactorization(A).solve(b);
    }
    return SpdFactorization(A).solve(b);
}

}  // namespace vfdw
