#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "oracles.hpp"
#include "vfdw/error.hpp"
#include "vfdw/fem.hpp"

using namespace vfdw;

namespace {

constexpr double pi = std::numbers::pi;

FemSpace space_1d(int J) { return FemSpace(make_mesh(Domain{}, J)); }

FemSpace space_2d(int J) {
    Domain d;
    d.dim = 2;
    return FemSpace(make_mesh(d, J));
}

double max_asymmetry(const SparseMatrix& A) {
    const Eigen::MatrixXd D(A);
    return (D - D.transpose()).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("mesh validation") {
    CHECK_THROWS_AS(make_mesh(Domain{}, 1), Error);
    Domain bad;
    bad.dim = 3;
    CHECK_THROWS_AS(make_mesh(bad, 4), Error);
    const Mesh m = make_mesh(Domain{1, {0.0, 2.0}, {0.0, 1.0}}, 8);
    CHECK(m.hx == 0.25);
    CHECK(m.dofs() == 7);
}

TEST_CASE("1D stencils") {
    const FemSpace s = space_1d(2);
    REQUIRE(s.size() == 1);
    CHECK(std::abs(Eigen::MatrixXd(s.mass())(0, 0) - 1.0 / 3.0) < 1e-15);
    CHECK(std::abs(Eigen::MatrixXd(s.stiffness())(0, 0) - 4.0) < 1e-15);

    const FemSpace s8 = space_1d(8);
    const Eigen::MatrixXd M(s8.mass());
    const Eigen::MatrixXd S(s8.stiffness());
    const double h = 1.0 / 8;
    CHECK(std::abs(M(3, 2) - h / 6) < 1e-15);
    CHECK(std::abs(M(3, 3) - 4 * h / 6) < 1e-15);
    CHECK(std::abs(S(3, 2) + 1 / h) < 1e-12);
    CHECK(std::abs(S(3, 3) - 2 / h) < 1e-12);
}

TEST_CASE("patch test: linear functions are discrete harmonic") {
    // u = x on [0,1] with J = 4: interior equations S u_int = -(boundary coupling)
    const FemSpace s = space_1d(4);
    const Vector u = s.interpolate([](double x, double) { return x; });
    Vector r = s.stiffness() * u;
    r[2] += -1.0 / 0.25 * 1.0;  // coupling of the last interior node to u(1) = 1
    CHECK(r.cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("2D Kronecker assembly") {
    const FemSpace s = space_2d(2);
    REQUIRE(s.size() == 1);
    const double h = 0.5;
    CHECK(std::abs(Eigen::MatrixXd(s.mass())(0, 0) - std::pow(2 * h / 3, 2)) < 1e-15);
    CHECK(std::abs(Eigen::MatrixXd(s.stiffness())(0, 0) - 2 * (2 / h) * (2 * h / 3)) < 1e-14);

    // elementwise assembly with the bilinear element matrices on J = 4
    const int J = 4;
    const FemSpace s4 = space_2d(J);
    const int n = J - 1;
    const double hh = 1.0 / J;
    const double Me[4][4] = {{4, 2, 2, 1}, {2, 4, 1, 2}, {2, 1, 4, 2}, {1, 2, 2, 4}};
    const double Ke[4][4] = {{4, -1, -1, -2}, {-1, 4, -2, -1}, {-1, -2, 4, -1}, {-2, -1, -1, 4}};
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n * n, n * n);
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n * n, n * n);
    for (int ey = 0; ey < J; ++ey) {
        for (int ex = 0; ex < J; ++ex) {
            // local order: (ex,ey), (ex+1,ey), (ex,ey+1), (ex+1,ey+1)
            const int gi[4][2] = {{ex, ey}, {ex + 1, ey}, {ex, ey + 1}, {ex + 1, ey + 1}};
            for (int a = 0; a < 4; ++a) {
                for (int b = 0; b < 4; ++b) {
                    const int ia = gi[a][0], ja = gi[a][1], ib = gi[b][0], jb = gi[b][1];
                    if (ia < 1 || ia > n || ja < 1 || ja > n || ib < 1 || ib > n || jb < 1 || jb > n) continue;
                    const int ra = (ja - 1) * n + ia - 1;
                    const int rb = (jb - 1) * n + ib - 1;
                    M(ra, rb) += hh * hh / 36 * Me[a][b];
                    K(ra, rb) += Ke[a][b] / 6.0;
                }
            }
        }
    }
    const Vector v = Vector::LinSpaced(n * n, -1.0, 2.0);
    CHECK((s4.mass() * v - M * v).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((s4.stiffness() * v - K * v).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("symmetry and positive definiteness") {
    for (int J : {4, 16, 64}) {
        const FemSpace s = space_1d(J);
        CHECK(max_asymmetry(s.mass()) == 0.0);
        CHECK(max_asymmetry(s.stiffness()) == 0.0);
        for (const SparseMatrix* A : {&s.mass(), &s.stiffness()}) {
            // inverse power iteration for the smallest eigenvalue
            Vector x = Vector::Ones(s.size());
            double lambda = 0.0;
            for (int it = 0; it < 50; ++it) {
                Vector y = solve_spd(*A, x);
                lambda = x.dot(x) / x.dot(y);
                x = y / y.norm();
            }
            CHECK(lambda > 0.0);
        }
    }
    const FemSpace s2 = space_2d(8);
    CHECK(max_asymmetry(s2.mass()) == 0.0);
    CHECK(max_asymmetry(s2.stiffness()) == 0.0);
}

TEST_CASE("loads integrate polynomials exactly") {
    // (x^3, chi_i) for piecewise linear hat functions: 4-point Gauss is exact
    const FemSpace s = space_1d(5);
    const Vector b = s.load([](double x, double) { return x * x * x; });
    const double h = 0.2;
    for (int i = 1; i <= 4; ++i) {
        const double xi = i * h;
        auto hat = [&](double x) { return std::max(0.0, 1.0 - std::abs(x - xi) / h); };
        const double ref = oracle::adaptive([&](double x) { return x * x * x * hat(x); }, xi - h, xi, 1e-16) +
                           oracle::adaptive([&](double x) { return x * x * x * hat(x); }, xi, xi + h, 1e-16);
        CHECK(std::abs(b[i - 1] - ref) < 1e-15);
    }
    const FemSpace s2 = space_2d(4);
    const Vector ones = s2.load([](double, double) { return 1.0; });
    CHECK((ones - s2.mass() * Vector::Ones(s2.size())).cwiseAbs().maxCoeff() > 0.0);  // boundary hats truncated
    const Vector interior = s2.load([](double, double) { return 1.0; });
    CHECK(std::abs(interior[4] - 1.0 / 16) < 1e-15);  // centre node: full hat volume h^2
}

TEST_CASE("ritz projection") {
    const FemSpace s = space_1d(16);
    const GradientField grad = [](double x, double) { return std::array<double, 2>{1.0 - 2.0 * x, 0.0}; };
    const Vector p = s.ritz_project(grad);
    // in 1D the Ritz projection interpolates exactly at the nodes
    const Vector nodal = s.interpolate([](double x, double) { return x * (1.0 - x); });
    CHECK((p - nodal).cwiseAbs().maxCoeff() < 1e-13);
    const Vector residual = s.gradient_load(grad) - s.stiffness() * p;
    CHECK(residual.cwiseAbs().maxCoeff() < 1e-12);

    // idempotence on the finite element space: a hat function
    const double h = 1.0 / 16;
    const GradientField hat_grad = [h](double x, double) {
        const double xi = 5 * h;
        if (x > xi - h && x < xi) return std::array<double, 2>{1.0 / h, 0.0};
        if (x > xi && x < xi + h) return std::array<double, 2>{-1.0 / h, 0.0};
        return std::array<double, 2>{0.0, 0.0};
    };
    const Vector e = s.ritz_project(hat_grad);
    for (int i = 0; i < s.size(); ++i) CHECK(std::abs(e[i] - (i == 4 ? 1.0 : 0.0)) < 1e-13);
}

TEST_CASE("ritz projection converges at second order in L2") {
    auto l2_error = [](int J) {
        const FemSpace s = space_1d(J);
        const Vector p = s.ritz_project([](double x, double) { return std::array<double, 2>{pi * std::cos(pi * x), 0.0}; });
        const double h = 1.0 / J;
        double total = 0.0;
        for (int e = 0; e < J; ++e) {
            const double ul = e == 0 ? 0.0 : p[e - 1];
            const double ur = e == J - 1 ? 0.0 : p[e];
            auto err2 = [&](double x) {
                const double s_ = (x - e * h) / h;
                const double d = std::sin(pi * x) - (ul * (1 - s_) + ur * s_);
                return d * d;
            };
            total += oracle::adaptive(err2, e * h, (e + 1) * h, 1e-18);
        }
        return std::sqrt(total);
    };
    const double ratio = l2_error(32) / l2_error(64);
    CHECK(std::abs(ratio - 4.0) < 0.1);
}

TEST_CASE("2D ritz orthogonality") {
    const FemSpace s = space_2d(8);
    const GradientField grad = [](double x, double y) {
        return std::array<double, 2>{pi * std::cos(pi * x) * std::sin(pi * y), pi * std::sin(pi * x) * std::cos(pi * y)};
    };
    const Vector p = s.ritz_project(grad);
    CHECK((s.gradient_load(grad) - s.stiffness() * p).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("spd solves") {
    const FemSpace s = space_1d(2);
    const Vector x = solve_spd(s.mass(), Vector::Ones(1));
    CHECK(std::abs(x[0] - 3.0) < 1e-14);

    const FemSpace s64 = space_1d(64);
    const Vector sine = s64.interpolate([](double x, double) { return std::sin(pi * x); });
    const Vector u = solve_spd(s64.stiffness(), s64.mass() * (pi * pi * sine));
    const double err = (u - sine).cwiseAbs().maxCoeff();
    CHECK(err < 1e-3);
    const FemSpace s128 = space_1d(128);
    const Vector sine2 = s128.interpolate([](double x, double) { return std::sin(pi * x); });
    const Vector u2 = solve_spd(s128.stiffness(), s128.mass() * (pi * pi * sine2));
    CHECK(std::abs(err / (u2 - sine2).cwiseAbs().maxCoeff() - 4.0) < 0.2);

    std::mt19937 rng(7);
    std::normal_distribution<double> nd;
    Eigen::MatrixXd G(5, 5);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) G(i, j) = nd(rng);
    const Eigen::MatrixXd A = G.transpose() * G + Eigen::MatrixXd::Identity(5, 5);
    const SparseMatrix As = A.sparseView();
    const Vector xs = Vector::LinSpaced(5, 1.0, 5.0);
    for (SpdMethod m : {SpdMethod::automatic, SpdMethod::cholesky, SpdMethod::conjugate_gradient}) {
        CHECK((solve_spd(As, As * xs, m) - xs).cwiseAbs().maxCoeff() < 1e-10);
    }
    CHECK_THROWS_AS(solve_spd(As, As * xs, SpdMethod::tridiagonal), Error);

    const FemSpace s2 = space_2d(16);
    const Vector b = s2.load([](double x, double y) { return x + y; });
    const Vector xc = solve_spd(s2.stiffness(), b, SpdMethod::cholesky);
    const CgResult cg = conjugate_gradient(s2.stiffness(), b);
    CHECK(cg.relative_residual <= 1e-12);
    CHECK((xc - cg.x).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("factorization rejects non-SPD coefficients") {
    const FemSpace s = space_1d(8);
    CHECK_THROWS_AS(SpdFactorization(s, -1.0, 1.0), Error);
    CHECK_THROWS_AS(SpdFactorization(s, 1.0, -0.1), Error);
    const SpdFactorization f(s, 2.0, 0.5);
    const Vector b = Vector::Ones(s.size());
    const Vector x = f.solve(b);
    CHECK(((2.0 * s.mass() + 0.5 * s.stiffness()) * x - b).norm() <= 1e-12 * b.norm());
}

TEST_CASE("norms") {
    const FemSpace s = space_1d(4);
    CHECK(std::abs(s.lumped_norm(Vector::Ones(3)) - std::sqrt(0.75)) < 1e-15);
    CHECK(s.lumped_norm(Vector::Zero(3)) == 0.0);
    CHECK_THROWS_AS(s.lumped_norm(Vector::Ones(4)), Error);

    auto rel_gap = [](int J) {
        const FemSpace sp = space_1d(J);
        const Vector u = sp.interpolate([](double x, double) { return std::sin(pi * x); });
        return std::abs(sp.lumped_norm(u) - sp.mass_norm(u)) / sp.mass_norm(u);
    };
    CHECK(std::abs(rel_gap(32) / rel_gap(64) - 4.0) < 0.1);

    const FemSpace s2 = space_2d(4);
    CHECK(std::abs(s2.lumped_norm(Vector::Ones(9)) - std::sqrt(9.0 / 16)) < 1e-15);
}

TEST_CASE("data maps for nodal-only data") {
    const FemSpace s = space_1d(8);
    SpatialFunction rough;
    rough.value = [](double x, double) { return std::pow(x, -0.25); };
    rough.nodal_only = true;
    const Vector nodal = s.interpolate(rough.value);
    CHECK((s.initial_coefficients(rough) - nodal).norm() == 0.0);
    CHECK((s.data_load(rough) - s.mass() * nodal).norm() == 0.0);
    CHECK((s.stiffness_load(rough) - s.stiffness() * nodal).norm() == 0.0);

    const SpatialFunction z = SpatialFunction::zero();
    CHECK(z.is_zero());
    CHECK(s.initial_coefficients(z).norm() == 0.0);
    CHECK(s.data_load(z).norm() == 0.0);
}
