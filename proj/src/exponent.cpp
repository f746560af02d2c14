#include "vfdw/exponent.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "vfdw/error.hpp"

namespace vfdw {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr int admissibility_samples = 4096;

}  // namespace

ExponentFunction ExponentFunction::constant(double alpha0, double horizon) {
    ExponentFunction f;
    f.kind_ = ExponentKind::constant;
    f.params_ = {alpha0, 0.0, 0.0, 0.0};
    f.horizon_ = horizon;
    f.finalize();
    return f;
}

ExponentFunction ExponentFunction::poly_offset(double alpha0, double c, double p, double horizon) {
    if (!(p > 0.0)) throw Error(Stage::exponent, "poly_offset: power must be positive");
    ExponentFunction f;
    f.kind_ = ExponentKind::poly_offset;
    f.params_ = {alpha0, c, p, 0.0};
    f.horizon_ = horizon;
    f.finalize();
    return f;
}

ExponentFunction ExponentFunction::sine_offset(double alpha0, double amplitude, double horizon) {
    ExponentFunction f;
    f.kind_ = ExponentKind::sine_offset;
    f.params_ = {alpha0, amplitude, 0.0, 0.0};
    f.horizon_ = horizon;
    f.finalize();
    return f;
}

ExponentFunction ExponentFunction::transition(double z1, double z2, double length, double horizon) {
    if (!(length > 0.0)) throw Error(Stage::exponent, "transition: length must be positive");
    ExponentFunction f;
    f.kind_ = ExponentKind::transition;
    f.params_ = {z1, z2, length, 0.0};
    f.horizon_ = horizon;
    f.finalize();
    return f;
}

ExponentFunction make_transition_exponent(double z1, double z2, double T) {
    return ExponentFunction::transition(z1, z2, T, T);
}

void ExponentFunction::finalize() {
    if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) {
        throw Error(Stage::exponent, "exponent horizon must be positive and finite");
    }
    alpha0_ = value(0.0);
    auto check = [this](double t) {
        const double a = value(t);
        if (!(a > 1.0 && a < 2.0)) {
            std::ostringstream msg;
            msg << describe() << " leaves (1,2): alpha(" << t << ") = " << a;
            throw Error(Stage::exponent, msg.str());
        }
    };
    for (int i = 0; i <= admissibility_samples; ++i) {
        check(horizon_ * i / admissibility_samples);
    }
    for (double b : breakpoints()) check(b);
}

double ExponentFunction::value(double t) const { return derivative(t, 0); }

double ExponentFunction::derivative(double t, int order) const {
    if (order < 0 || order > 3) throw Error(Stage::exponent, "derivative order must be in 0..3");
    switch (kind_) {
        case ExponentKind::constant:
            return order == 0 ? params_[0] : 0.0;

        case ExponentKind::poly_offset: {
            const double c = params_[1];
            const double p = params_[2];
            double coeff = c;
            for (int k = 0; k < order; ++k) coeff *= (p - k);
            if (coeff == 0.0) return order == 0 ? params_[0] : 0.0;
            const double term = coeff * std::pow(t, p - order);
            return order == 0 ? params_[0] + term : term;
        }

        case ExponentKind::sine_offset: {
            const double a = params_[1];
            switch (order) {
                case 0: return params_[0] + a * std::sin(t);
                case 1: return a * std::cos(t);
                case 2: return -a * std::sin(t);
                default: return -a * std::cos(t);
            }
        }

        case ExponentKind::transition: {
            const double z1 = params_[0];
            const double d = params_[1] - params_[0];
            const double length = params_[2];
            if (t >= length) return order == 0 ? z1 : 0.0;
            // sin(2 pi (1 - t/L)) = -sin(2 pi t / L)
            const double phase = two_pi * t / length;
            switch (order) {
                case 0: return z1 + d * ((1.0 - t / length) + std::sin(phase) / two_pi);
                case 1: return d * (std::cos(phase) - 1.0) / length;
                case 2: return -d * two_pi * std::sin(phase) / (length * length);
                default: return -d * two_pi * two_pi * std::cos(phase) / (length * length * length);
            }
        }

        case ExponentKind::smoothed: {
            const double sigma = params_[1];
            if (t <= sigma) return order == 0 ? params_[0] : 0.0;
            if (t >= 2.0 * sigma) return base_->derivative(t, order);
            const double s = (t - sigma) / sigma;
            // p(s) = alpha0 + sum_k blend_k s^(k+4); differentiate term by term in s
            double acc = 0.0;
            for (int k = 0; k < 4; ++k) {
                const int power = k + 4;
                double coeff = blend_[static_cast<std::size_t>(k)];
                for (int j = 0; j < order; ++j) coeff *= (power - j);
                acc += coeff * std::pow(s, power - order);
            }
            if (order == 0) return params_[0] + acc;
            return acc / std::pow(sigma, order);
        }
    }
    return params_[0];
}

std::vector<double> ExponentFunction::breakpoints() const {
    std::vector<double> out;
    switch (kind_) {
        case ExponentKind::transition:
            if (params_[2] < horizon_) out.push_back(params_[2]);
            break;
        case ExponentKind::smoothed:
            out = base_->breakpoints();
            out.push_back(params_[1]);
            out.push_back(2.0 * params_[1]);
            break;
        default:
            break;
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::string ExponentFunction::describe() const {
    std::ostringstream os;
    os.precision(6);
    switch (kind_) {
        case ExponentKind::constant:
            os << "constant(alpha0=" << params_[0] << ")";
            break;
        case ExponentKind::poly_offset:
            os << "poly_offset(alpha0=" << params_[0] << ", c=" << params_[1] << ", p=" << params_[2] << ")";
            break;
        case ExponentKind::sine_offset:
            os << "sine_offset(alpha0=" << params_[0] << ", a=" << params_[1] << ")";
            break;
        case ExponentKind::transition:
            os << "transition(z1=" << params_[0] << ", z2=" << params_[1] << ", length=" << params_[2] << ")";
            break;
        case ExponentKind::smoothed:
            os << "smoothed(" << base_->describe() << ", sigma=" << params_[1] << ")";
            break;
    }
    return os.str();
}

ExponentFunction smooth_exponent(const ExponentFunction& f, double sigma) {
    if (!(sigma > 0.0) || !(2.0 * sigma < f.horizon())) {
        throw Error(Stage::exponent, "smooth_exponent: need 0 < 2 sigma < T");
    }
    const double a0 = f.alpha0();
    const double end = 2.0 * sigma;

    // s^4 (c0 + c1 s + c2 s^2 + c3 s^3) matching the k-th s-derivative sigma^k alpha^(k)(2 sigma) at s = 1
    Eigen::Matrix4d system;
    system << 1, 1, 1, 1,
              4, 5, 6, 7,
              12, 20, 30, 42,
              24, 60, 120, 210;
    Eigen::Vector4d rhs;
    rhs << f.value(end) - a0,
           sigma * f.derivative(end, 1),
           sigma * sigma * f.derivative(end, 2),
           sigma * sigma * sigma * f.derivative(end, 3);
    const Eigen::Vector4d c = system.fullPivLu().solve(rhs);

    ExponentFunction out;
    out.kind_ = ExponentKind::smoothed;
    out.params_ = {a0, sigma, 0.0, 0.0};
    out.horizon_ = f.horizon();
    out.base_ = std::make_shared<const ExponentFunction>(f);
    out.blend_ = {c[0], c[1], c[2], c[3]};
    out.finalize();
    return out;
}

// ---------------------------------------------------------------------------

GQuadrature::GQuadrature(double alpha0, int node_count, double rel_tol, int max_nodes)
    : alpha0_(alpha0), node_count_(node_count), rel_tol_(rel_tol), max_nodes_(max_nodes) {
    if (!(alpha0 > 1.0 && alpha0 < 2.0)) throw Error(Stage::exponent, "GQuadrature: alpha0 must lie in (1,2)");
    if (node_count < 1 || max_nodes < node_count) throw Error(Stage::exponent, "GQuadrature: bad node counts");
    if (!(rel_tol > 0.0)) throw Error(Stage::exponent, "GQuadrature: rel_tol must be positive");
    int levels = 1;
    for (int n = node_count; n * 2 <= max_nodes; n *= 2) ++levels;
    if (levels > max_levels) throw Error(Stage::exponent, "GQuadrature: too many doubling levels");
}

int GQuadrature::grading_depth(int nodes_per_panel) { return std::min(3 * nodes_per_panel, 60); }

const GQuadrature::PanelRules& GQuadrature::rules(int nodes_per_panel) const {
    int level = 0;
    for (int n = node_count_; n < nodes_per_panel; n *= 2) ++level;
    if (level >= max_levels || (node_count_ << level) != nodes_per_panel) {
        throw Error(Stage::exponent, "GQuadrature: node count is not a doubling of the base count");
    }
    const auto idx = static_cast<std::size_t>(level);
    std::call_once(once_[idx], [&] {
        auto r = std::make_unique<PanelRules>();
        r->left = gauss_jacobi_rule(nodes_per_panel, 0.0, 1.0 - alpha0_);
        r->right = gauss_jacobi_rule(nodes_per_panel, alpha0_ - 2.0, 0.0);
        r->interior = gauss_legendre_rule(nodes_per_panel);
        levels_[idx] = std::move(r);
    });
    return *levels_[idx];
}

double GQuadrature::integrate(const std::function<double(double)>& phi, int nodes_per_panel,
                              const std::vector<double>& extra_breaks) const {
    const PanelRules& r = rules(nodes_per_panel);
    const double a = alpha0_ - 2.0;
    const double b = 1.0 - alpha0_;

    std::vector<double> edges;
    const int depth = grading_depth(nodes_per_panel);
    edges.reserve(static_cast<std::size_t>(depth) + 3 + extra_breaks.size());
    edges.push_back(0.0);
    for (int k = depth; k >= 1; --k) edges.push_back(std::ldexp(0.5, -k));
    edges.push_back(0.5);
    edges.push_back(1.0);
    for (double e : extra_breaks) {
        if (e > 0.0 && e < 1.0) edges.push_back(e);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    double total = 0.0;
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        const double lo = edges[p];
        const double hi = edges[p + 1];
        const double len = hi - lo;
        double panel = 0.0;
        if (lo == 0.0) {
            // int_0^hi z^b F(z) dz = hi^(b+1) int_0^1 s^b F(hi s) ds
            for (std::size_t i = 0; i < r.left.size(); ++i) {
                const double z = hi * r.left.nodes[i];
                panel += r.left.weights[i] * std::pow(1.0 - z, a) * phi(z);
            }
            panel *= std::pow(hi, b + 1.0);
        } else if (hi == 1.0) {
            // int_lo^1 (1-z)^a F(z) dz = len^(a+1) int_0^1 (1-s)^a F(lo + len s) ds
            for (std::size_t i = 0; i < r.right.size(); ++i) {
                const double z = lo + len * r.right.nodes[i];
                panel += r.right.weights[i] * std::pow(z, b) * phi(z);
            }
            panel *= std::pow(len, a + 1.0);
        } else {
            for (std::size_t i = 0; i < r.interior.size(); ++i) {
                const double z = lo + len * r.interior.nodes[i];
                panel += r.interior.weights[i] * std::pow(1.0 - z, a) * std::pow(z, b) * phi(z);
            }
            panel *= len;
        }
        total += panel;
    }
    return total;
}

double g_weight_mass(const GQuadrature& q, int nodes_per_panel) {
    return q.integrate([](double) { return 1.0; }, nodes_per_panel, {});
}

double eval_g(const ExponentFunction& f, double t, const GQuadrature& q) {
    if (!(t >= 0.0)) throw Error(Stage::exponent, "eval_g: t must be nonnegative");
    if (t == 0.0) return 1.0;
    if (std::abs(q.alpha0() - f.alpha0()) > 1e-15) {
        throw Error(Stage::exponent, "eval_g: quadrature built for a different alpha0");
    }
    const double a0 = f.alpha0();
    const double inv_gamma_a0m1 = 1.0 / std::tgamma(a0 - 1.0);
    auto phi = [&](double z) {
        const double tz = t * z;
        const double alpha = f.value(tz);
        return std::exp((a0 - alpha) * std::log(tz)) * inv_gamma_a0m1 / std::tgamma(2.0 - alpha);
    };

    std::vector<double> breaks;
    for (double b : f.breakpoints()) {
        if (b < t) breaks.push_back(b / t);
    }

    double previous = 0.0;
    bool have_previous = false;
    for (int n = q.node_count(); n <= q.max_nodes(); n *= 2) {
        const double current = q.integrate(phi, n, breaks);
        if (have_previous && std::abs(current - previous) <= q.rel_tol() * std::abs(current)) {
            return current;
        }
        previous = current;
        have_previous = true;
    }
    std::ostringstream msg;
    msg << "g(" << t << ") did not converge to rel_tol " << q.rel_tol() << " with " << q.max_nodes()
        << " nodes per panel for " << f.describe();
    throw Error(Stage::exponent, msg.str());
}

}  // namespace vfdw
