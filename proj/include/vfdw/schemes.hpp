#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "vfdw/exponent.hpp"
#include "vfdw/fem.hpp"
#include "vfdw/weights.hpp"

namespace vfdw {

enum class Scheme {
    alpha0_order,  // BDF2 + second-order CQ on the transformed unknown u - u0
    second_order,  // Crank-Nicolson type with averaged product integration
};

const char* scheme_name(Scheme s);

/// Time factor theta(t) of a separable source f(x,t) = phi(x) theta(t).
class TemporalFactor {
public:
    enum class Kind { zero, one, exponential, custom };

    static TemporalFactor zero();
    static TemporalFactor one();
    /// exp(-rate t), rate >= 0.
    static TemporalFactor exponential(double rate);
    static TemporalFactor custom(std::function<double(double)> theta);

    Kind kind() const { return kind_; }
    double rate() const { return rate_; }
    double value(double t) const;
    bool has_closed_integral() const { return kind_ != Kind::custom; }
    /// (beta_mu * theta)(t) for mu > 0; only for the closed kinds.
    double fractional_integral(double mu, double t) const;

private:
    Kind kind_ = Kind::zero;
    double rate_ = 0.0;
    std::function<double(double)> theta_;
};

struct ProblemSpec {
    ExponentFunction exponent = ExponentFunction::constant(1.5, 1.0);
    double kappa = 1.0;
    double T = 1.0;
    Domain domain;
    SpatialFunction u0 = SpatialFunction::zero();
    SpatialFunction ubar0 = SpatialFunction::zero();
    SpatialFunction source_profile = SpatialFunction::zero();
    TemporalFactor source_time = TemporalFactor::zero();
    std::string name;

    void validate() const;
};

struct RunOptions {
    double g_rel_tol = 1e-12;
    int g_base_nodes = 8;
    int g_max_nodes = 512;
    SpdMethod solver = SpdMethod::automatic;
    bool nodal_initial_state = false;  // second-order scheme: U^0 by interpolation instead of Ritz projection
};

/// Everything a run needs that does not change with the step index.
struct DiscreteProblem {
    DiscreteProblem(const ProblemSpec& spec, const Mesh& mesh, int N, Scheme scheme, const RunOptions& options = {});

    ProblemSpec spec;
    Scheme scheme;
    RunOptions options;
    FemSpace space;
    WeightTables tables;
    Vector lambda_u0;     // Ritz projection of u0 (nodal values for rough data)
    Vector u0_stiffness;  // (grad u0, grad chi_i)
    Vector ubar0_load;    // (ubar0, chi_i)
    Vector source_load;   // (phi, chi_i)
    std::vector<double> g_average;  // (1/tau) int_{t_{n-1}}^{t_n} g, index n = 1..N (second-order scheme only)
};

/// (F(t_n), chi_i) for the transformed problem:
/// -kappa beta_{abar+1}(t_n) (grad u0, grad chi) + (beta_abar * f)(t_n) + g(t_n) (ubar0, chi).
Vector rhs_scheme1(const DiscreteProblem& dp, int n);

/// (1/tau) int_{t_{n-1}}^{t_n} [(beta_abar * f)(t) + g(t) ubar0] dt tested against chi_i.
Vector rhs_scheme2(const DiscreteProblem& dp, int n);

struct SolutionHistory {
    Scheme scheme = Scheme::alpha0_order;
    int N = 0;
    double tau = 0.0;
    Eigen::MatrixXd states;  // column n holds the scheme's unknown at t_n
    Vector offset;           // added to every state to obtain U^n (Lambda_h u0 for the alpha0-order scheme)

    Vector solution(int n) const { return states.col(n) + offset; }
    Vector final_solution() const { return solution(N); }
};

/// Advances one scheme step by step; owns the history and the two factorizations.
class Stepper {
public:
    explicit Stepper(const DiscreteProblem& dp);

    int step_index() const { return n_; }
    /// Computes the state at t_{n+1} from the stored history.
    void step();
    const Eigen::MatrixXd& states() const { return U_; }
    SolutionHistory finish() &&;

private:
    Vector step_scheme1(int n);
    Vector step_scheme2(int n);

    const DiscreteProblem& dp_;
    int n_ = 0;
    Eigen::MatrixXd U_;
    Eigen::MatrixXd aux_;  // alpha0-order: increments U^k - U^{k-1}; second-order: midpoints U^{k-1/2}
    // lag-indexed history weights stored reversed: rev[i] = weight at lag N - i
    Vector rev_a_;
    Vector rev_b_;
    std::unique_ptr<SpdFactorization> first_;
    std::unique_ptr<SpdFactorization> rest_;
};

SolutionHistory run(const ProblemSpec& spec, const Mesh& mesh, int N, Scheme scheme, const RunOptions& options = {});

}  // namespace vfdw
