#include "vfdw/schemes.hpp"

#include <cmath>
#include <sstream>

#include "vfdw/error.hpp"
#include "vfdw/special.hpp"

namespace vfdw {

const char* scheme_name(Scheme s) {
    switch (s) {
        case Scheme::alpha0_order: return "alpha0-order";
        case Scheme::second_order: return "second-order";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------

TemporalFactor TemporalFactor::zero() { return TemporalFactor{}; }

TemporalFactor TemporalFactor::one() {
    TemporalFactor f;
    f.kind_ = Kind::one;
    return f;
}

TemporalFactor TemporalFactor::exponential(double rate) {
    if (!(rate >= 0.0) || !std::isfinite(rate)) throw Error(Stage::config, "exponential source rate must be >= 0");
    TemporalFactor f;
    f.kind_ = Kind::exponential;
    f.rate_ = rate;
    return f;
}

TemporalFactor TemporalFactor::custom(std::function<double(double)> theta) {
    if (!theta) throw Error(Stage::config, "custom source needs a time function");
    TemporalFactor f;
    f.kind_ = Kind::custom;
    f.theta_ = std::move(theta);
    return f;
}

double TemporalFactor::value(double t) const {
    switch (kind_) {
        case Kind::zero: return 0.0;
        case Kind::one: return 1.0;
        case Kind::exponential: return std::exp(-rate_ * t);
        case Kind::custom: return theta_(t);
    }
    return 0.0;
}

double TemporalFactor::fractional_integral(double mu, double t) const {
    if (!(mu > 0.0)) throw Error(Stage::assembly, "fractional integral order must be positive");
    if (t <= 0.0) return 0.0;
    switch (kind_) {
        case Kind::zero:
            return 0.0;
        case Kind::one:
            return std::pow(t, mu) / gamma_fn(mu + 1.0);
        case Kind::exponential: {
            // e^{-rt} t^mu / Gamma(mu) sum_k (rt)^k / (k! (mu + k)); all terms positive
            const double x = rate_ * t;
            double term = 1.0;
            double sum = 1.0 / mu;
            for (int k = 1; k < 10000; ++k) {
                term *= x / k;
                const double add = term / (mu + k);
                sum += add;
                if (k > x && add <= 1e-17 * sum) break;
            }
            return std::exp(-x + mu * std::log(t) - std::lgamma(mu)) * sum;
        }
        case Kind::custom:
            throw Error(Stage::assembly, "custom source has no closed-form fractional integral");
    }
    return 0.0;
}

void ProblemSpec::validate() const {
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw Error(Stage::config, "kappa must be positive");
    if (!(T > 0.0) || !std::isfinite(T)) throw Error(Stage::config, "T must be positive");
    if (exponent.horizon() < T * (1.0 - 1e-12)) {
        throw Error(Stage::config, "exponent admissibility was checked on a horizon shorter than T");
    }
    if (source_time.kind() != TemporalFactor::Kind::zero && source_profile.is_zero()) {
        throw Error(Stage::config, "source has a time factor but no spatial profile");
    }
}

// ---------------------------------------------------------------------------

namespace {

// (1/tau) int_{t_{n-1}}^{t_n} g by two-point Gauss-Legendre, n = 1..N
std::vector<double> g_step_averages(const ExponentFunction& f, const GQuadrature& q, int N, double tau) {
    std::vector<double> out(static_cast<std::size_t>(N) + 1, 0.0);
    const double d = 0.5 * tau / std::sqrt(3.0);
    for (int n = 1; n <= N; ++n) {
        const double mid = (n - 0.5) * tau;
        out[static_cast<std::size_t>(n)] = 0.5 * (eval_g(f, mid - d, q) + eval_g(f, mid + d, q));
    }
    return out;
}

Vector reversed_by_lag(const std::vector<double>& by_lag, int N) {
    Vector r = Vector::Zero(N + 1);
    for (int i = 1; i <= N; ++i) {
        const auto lag = static_cast<std::size_t>(N - i);
        if (lag < by_lag.size()) r[i] = by_lag[lag];
    }
    return r;
}

}  // namespace

DiscreteProblem::DiscreteProblem(const ProblemSpec& spec_in, const Mesh& mesh, int N, Scheme scheme_in,
                                 const RunOptions& options_in)
    : spec(spec_in), scheme(scheme_in), options(options_in), space(mesh) {
    spec.validate();
    if (N < 1) throw Error(Stage::config, "N must be at least 1");
    if (mesh.dim() != spec.domain.dim) throw Error(Stage::config, "mesh and problem dimensions differ");

    const GQuadrature q(spec.exponent.alpha0(), options.g_base_nodes, options.g_rel_tol, options.g_max_nodes);
    tables = build_weight_tables(spec.exponent, q, N, spec.T);
    if (scheme == Scheme::second_order) g_average = g_step_averages(spec.exponent, q, N, tables.tau);

    lambda_u0 = space.initial_coefficients(spec.u0);
    if (scheme == Scheme::second_order && options.nodal_initial_state && !spec.u0.is_zero()) {
        lambda_u0 = space.interpolate(spec.u0.value);
    }
    u0_stiffness = space.stiffness_load(spec.u0);
    ubar0_load = space.data_load(spec.ubar0);
    source_load = spec.source_time.kind() == TemporalFactor::Kind::zero ? Vector::Zero(space.size())
                                                                         : space.data_load(spec.source_profile);
}

Vector rhs_scheme1(const DiscreteProblem& dp, int n) {
    const WeightTables& tb = dp.tables;
    if (n < 1 || n > tb.N) throw Error(Stage::assembly, "rhs_scheme1: step index out of range");
    const double abar = tb.abar;
    const double tn = n * tb.tau;
    const TemporalFactor& theta = dp.spec.source_time;

    double conv = 0.0;
    if (theta.kind() == TemporalFactor::Kind::custom) {
        // product integration with theta sampled at step midpoints
        auto B1 = [abar](double s) { return s > 0.0 ? std::pow(s, abar) / gamma_fn(abar + 1.0) : 0.0; };
        for (int j = 1; j <= n; ++j) {
            conv += theta.value((j - 0.5) * tb.tau) * (B1(tn - (j - 1) * tb.tau) - B1(tn - j * tb.tau));
        }
    } else {
        conv = theta.fractional_integral(abar, tn);
    }

    const double u0_coeff = -dp.spec.kappa * std::pow(tn, abar) / gamma_fn(abar + 1.0);
    return u0_coeff * dp.u0_stiffness + conv * dp.source_load + tb.g[static_cast<std::size_t>(n)] * dp.ubar0_load;
}

Vector rhs_scheme2(const DiscreteProblem& dp, int n) {
    const WeightTables& tb = dp.tables;
    if (n < 1 || n > tb.N) throw Error(Stage::assembly, "rhs_scheme2: step index out of range");
    if (dp.g_average.size() != static_cast<std::size_t>(tb.N) + 1) {
        throw Error(Stage::assembly, "rhs_scheme2: problem was not discretized for the second-order scheme");
    }
    const double abar = tb.abar;
    const double tau = tb.tau;
    const TemporalFactor& theta = dp.spec.source_time;

    double conv_avg = 0.0;
    if (theta.kind() == TemporalFactor::Kind::custom) {
        conv_avg = tb.pi_diag * theta.value((n - 0.5) * tau);
        for (int j = 1; j < n; ++j) {
            conv_avg += tb.pi_off[static_cast<std::size_t>(n - j)] * theta.value((j - 0.5) * tau);
        }
    } else {
        // exact step average of beta_abar * theta via its antiderivative beta_{abar+1} * theta
        conv_avg = (theta.fractional_integral(abar + 1.0, n * tau) -
                    theta.fractional_integral(abar + 1.0, (n - 1) * tau)) / tau;
    }
    return conv_avg * dp.source_load + dp.g_average[static_cast<std::size_t>(n)] * dp.ubar0_load;
}

// ---------------------------------------------------------------------------

Stepper::Stepper(const DiscreteProblem& dp) : dp_(dp) {
    const WeightTables& tb = dp.tables;
    const int N = tb.N;
    const int m = dp.space.size();
    const double tau = tb.tau;
    const double kappa = dp.spec.kappa;
    const double w0 = tb.w[0];

    U_ = Eigen::MatrixXd::Zero(m, N + 1);
    aux_ = Eigen::MatrixXd::Zero(m, N + 1);

    auto factor = [&](double mc, double sc, const char* which) {
        if (!(mc > 0.0) || !(sc > 0.0)) {
            std::ostringstream msg;
            msg << scheme_name(dp.scheme) << " " << which << " matrix " << mc << " M + " << sc
                << " S is not SPD (w0 = " << w0 << ")";
            throw Error(Stage::solve, msg.str());
        }
        return std::make_unique<SpdFactorization>(dp.space, mc, sc);
    };

    if (dp.scheme == Scheme::alpha0_order) {
        const double cq = kappa * std::pow(tau, tb.abar) * tb.chi[0];
        first_ = factor((1.0 + w0) / tau, cq, "first-step");
        if (N >= 2) rest_ = factor((1.5 + w0) / tau, cq, "multistep");
        rev_a_ = reversed_by_lag(tb.w, N);
        rev_b_ = reversed_by_lag(tb.chi, N);
    } else {
        U_.col(0) = dp.lambda_u0;
        first_ = factor((1.0 + 0.5 * w0) / tau, kappa * tb.pi_diag, "first-step");
        if (N >= 2) rest_ = factor((1.0 + 0.5 * w0) / tau, 0.5 * kappa * tb.pi_diag, "multistep");
        std::vector<double> dw(static_cast<std::size_t>(N), 0.0);
        for (int k = 1; k < N; ++k) {
            dw[static_cast<std::size_t>(k)] = tb.w[static_cast<std::size_t>(k - 1)] - tb.w[static_cast<std::size_t>(k)];
        }
        rev_a_ = reversed_by_lag(dw, N);
        rev_b_ = reversed_by_lag(tb.pi_off, N);
    }
}

void Stepper::step() {
    const int n = n_ + 1;
    if (n > dp_.tables.N) throw Error(Stage::solve, "stepper advanced past N");
    try {
        const Vector next = dp_.scheme == Scheme::alpha0_order ? step_scheme1(n) : step_scheme2(n);
        U_.col(n) = next;
    } catch (const Error& e) {
        std::ostringstream msg;
        msg << "step " << n << ": " << e.what();
        throw Error(e.stage(), msg.str());
    }
    if (dp_.scheme == Scheme::alpha0_order) {
        aux_.col(n) = U_.col(n) - U_.col(n - 1);
    } else {
        aux_.col(n) = 0.5 * (U_.col(n) + U_.col(n - 1));
    }
    n_ = n;
}

Vector Stepper::step_scheme1(int n) {
    const WeightTables& tb = dp_.tables;
    const int N = tb.N;
    const double tau = tb.tau;
    const double w0 = tb.w[0];
    const double cq = dp_.spec.kappa * std::pow(tau, tb.abar);
    const SparseMatrix& M = dp_.space.mass();
    const SparseMatrix& S = dp_.space.stiffness();

    Vector rhs = rhs_scheme1(dp_, n);
    const double omega_n = tb.omega_corr[static_cast<std::size_t>(n)];
    if (n == 1) {
        rhs += M * (((1.0 + w0) / tau) * U_.col(0)) - S * ((cq * omega_n) * U_.col(0));
        return first_->solve(rhs);
    }
    // known part of the BDF2 difference, the w-history and the CQ history
    Vector mass_part = (2.0 * U_.col(n - 1) - 0.5 * U_.col(n - 2) + w0 * U_.col(n - 1)) / tau;
    mass_part.noalias() -= aux_.middleCols(1, n - 1) * rev_a_.segment(N - n + 1, n - 1) / tau;
    Vector stiff_part = omega_n * U_.col(0);
    stiff_part.noalias() += U_.middleCols(1, n - 1) * rev_b_.segment(N - n + 1, n - 1);
    rhs += M * mass_part - S * (cq * stiff_part);
    return rest_->solve(rhs);
}

Vector Stepper::step_scheme2(int n) {
    const WeightTables& tb = dp_.tables;
    const int N = tb.N;
    const double tau = tb.tau;
    const double w0 = tb.w[0];
    const double kappa = dp_.spec.kappa;
    const SparseMatrix& M = dp_.space.mass();
    const SparseMatrix& S = dp_.space.stiffness();

    Vector rhs = rhs_scheme2(dp_, n);
    if (n == 1) {
        rhs += M * (((1.0 + 0.5 * w0) / tau) * U_.col(0));
        return first_->solve(rhs);
    }
    Vector mass_part = ((1.0 - 0.5 * w0) / tau) * U_.col(n - 1) +
                       (tb.w[static_cast<std::size_t>(n - 1)] / tau) * U_.col(0);
    mass_part.noalias() += aux_.middleCols(1, n - 1) * rev_a_.segment(N - n + 1, n - 1) / tau;
    Vector stiff_part = tb.pi_off[static_cast<std::size_t>(n - 1)] * U_.col(1) + (0.5 * tb.pi_diag) * U_.col(n - 1);
    if (n >= 3) stiff_part.noalias() += aux_.middleCols(2, n - 2) * rev_b_.segment(N - n + 2, n - 2);
    rhs += M * mass_part - S * (kappa * stiff_part);
    return rest_->solve(rhs);
}

SolutionHistory Stepper::finish() && {
    if (n_ != dp_.tables.N) throw Error(Stage::solve, "stepper finished before reaching N");
    SolutionHistory h;
    h.scheme = dp_.scheme;
    h.N = dp_.tables.N;
    h.tau = dp_.tables.tau;
    h.states = std::move(U_);
    h.offset = dp_.scheme == Scheme::alpha0_order ? dp_.lambda_u0 : Vector::Zero(dp_.space.size());
    return h;
}

SolutionHistory run(const ProblemSpec& spec, const Mesh& mesh, int N, Scheme scheme, const RunOptions& options) {
    const DiscreteProblem dp(spec, mesh, N, scheme, options);
    Stepper stepper(dp);
    for (int n = 1; n <= N; ++n) stepper.step();
    return std::move(stepper).finish();
}

}  // namespace vfdw
