#include "vfdw/harness.hpp"

#include <cmath>
#include <cstdio>
#include <future>
#include <map>
#include <sstream>

#include "json.hpp"

#include "vfdw/error.hpp"

namespace vfdw {

const char* axis_name(StudyAxis a) { return a == StudyAxis::time ? "time" : "space"; }

void StudySpec::validate() const {
    problem.validate();
    if (levels.empty()) throw Error(Stage::config, "study '" + label + "' has no refinement levels");
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (levels[i] < 1) throw Error(Stage::config, "study '" + label + "': refinement levels must be positive");
        if (i > 0 && levels[i] != 2 * levels[i - 1]) {
            throw Error(Stage::config, "study '" + label + "': each refinement level must double the previous");
        }
    }
    if (axis == StudyAxis::space && levels.front() < 2) throw Error(Stage::config, "spatial levels need J >= 2");
    if (axis == StudyAxis::time && fixed < 2) throw Error(Stage::config, "time studies need a fixed J >= 2");
    if (axis == StudyAxis::space && fixed < 1) throw Error(Stage::config, "space studies need a fixed N >= 1");
    if (threads < 1) throw Error(Stage::config, "threads must be at least 1");
}

std::optional<double> ConvergenceReport::final_rate() const {
    if (rows.empty()) return std::nullopt;
    return rows.back().rate;
}

namespace {

struct RunSummary {
    Vector final_state;
    double max_norm = 0.0;
};

RunSummary summarize(const FemSpace& space, const SolutionHistory& h) {
    RunSummary s;
    for (int n = 0; n <= h.N; ++n) s.max_norm = std::max(s.max_norm, space.lumped_norm(h.solution(n)));
    s.final_state = h.final_solution();
    return s;
}

RunSummary run_and_summarize(const ProblemSpec& problem, Scheme scheme, int J, int N, const RunOptions& options) {
    const Mesh mesh = make_mesh(problem.domain, J);
    const FemSpace space(mesh);
    return summarize(space, run(problem, mesh, N, scheme, options));
}

std::string format(const char* fmt, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

}  // namespace

double restricted_distance(const FemSpace& coarse, const Vector& u_coarse, const Vector& u_fine) {
    const Mesh& m = coarse.mesh();
    const int n = m.interior_per_axis();
    const int nf = 2 * m.J - 1;
    Vector diff(coarse.size());
    if (m.dim() == 1) {
        if (u_fine.size() != nf) throw Error(Stage::report, "fine state does not match a twice-refined mesh");
        for (int j = 1; j <= n; ++j) diff[j - 1] = u_coarse[j - 1] - u_fine[2 * j - 1];
    } else {
        if (u_fine.size() != nf * nf) throw Error(Stage::report, "fine state does not match a twice-refined mesh");
        for (int j = 1; j <= n; ++j) {
            for (int i = 1; i <= n; ++i) {
                diff[(j - 1) * n + (i - 1)] = u_coarse[(j - 1) * n + (i - 1)] - u_fine[(2 * j - 1) * nf + (2 * i - 1)];
            }
        }
    }
    return coarse.lumped_norm(diff);
}

double self_error_time(const ProblemSpec& problem, Scheme scheme, int J, int N, const RunOptions& options) {
    const Mesh mesh = make_mesh(problem.domain, J);
    const FemSpace space(mesh);
    const Vector a = run(problem, mesh, N, scheme, options).final_solution();
    const Vector b = run(problem, mesh, 2 * N, scheme, options).final_solution();
    return space.lumped_norm(a - b);
}

double self_error_space(const ProblemSpec& problem, Scheme scheme, int J, int N, const RunOptions& options) {
    const Mesh coarse = make_mesh(problem.domain, J);
    const Mesh fine = make_mesh(problem.domain, 2 * J);
    const Vector a = run(problem, coarse, N, scheme, options).final_solution();
    const Vector b = run(problem, fine, N, scheme, options).final_solution();
    return restricted_distance(FemSpace(coarse), a, b);
}

ConvergenceReport run_study(const StudySpec& spec) {
    spec.validate();

    // refinement parameters of all runs: the listed levels plus one more doubling
    std::vector<int> params = spec.levels;
    params.push_back(2 * spec.levels.back());

    auto job = [&spec](int p) {
        const int J = spec.axis == StudyAxis::time ? spec.fixed : p;
        const int N = spec.axis == StudyAxis::time ? p : spec.fixed;
        try {
            return run_and_summarize(spec.problem, spec.scheme, J, N, spec.options);
        } catch (const Error& e) {
            std::ostringstream msg;
            msg << spec.label << " (" << axis_name(spec.axis) << " level " << p << ", J = " << J << ", N = " << N
                << "): " << e.what();
            throw Error(e.stage(), msg.str());
        }
    };

    std::vector<RunSummary> runs(params.size());
    if (spec.threads <= 1) {
        for (std::size_t i = 0; i < params.size(); ++i) runs[i] = job(params[i]);
    } else {
        // largest runs first so the batch finishes together
        for (std::size_t start = 0; start < params.size(); start += static_cast<std::size_t>(spec.threads)) {
            std::vector<std::pair<std::size_t, std::future<RunSummary>>> batch;
            for (std::size_t k = 0; k < static_cast<std::size_t>(spec.threads) && start + k < params.size(); ++k) {
                const std::size_t idx = params.size() - 1 - (start + k);
                batch.emplace_back(idx, std::async(std::launch::async, job, params[idx]));
            }
            for (auto& [idx, fut] : batch) runs[idx] = fut.get();
        }
    }

    ConvergenceReport r;
    r.label = spec.label;
    r.problem_name = spec.problem.name;
    r.exponent = spec.problem.exponent.describe();
    r.scheme = spec.scheme;
    r.axis = spec.axis;
    r.alpha0 = spec.problem.exponent.alpha0();
    r.fixed = spec.fixed;
    for (std::size_t i = 0; i < spec.levels.size(); ++i) {
        ReportRow row;
        row.level = spec.levels[i];
        if (spec.axis == StudyAxis::time) {
            const FemSpace space(make_mesh(spec.problem.domain, spec.fixed));
            row.error = space.lumped_norm(runs[i].final_state - runs[i + 1].final_state);
        } else {
            const FemSpace coarse(make_mesh(spec.problem.domain, spec.levels[i]));
            row.error = restricted_distance(coarse, runs[i].final_state, runs[i + 1].final_state);
        }
        if (i > 0 && row.error > 0.0 && r.rows.back().error > 0.0) row.rate = std::log2(r.rows.back().error / row.error);
        r.rows.push_back(row);
    }
    for (std::size_t i = 0; i < params.size(); ++i) r.stability.emplace_back(params[i], runs[i].max_norm);
    return r;
}

std::string report_csv(const ConvergenceReport& r) {
    std::ostringstream os;
    os << "level_param,error,rate\n";
    for (const ReportRow& row : r.rows) {
        os << row.level << ',' << format("%.10e", row.error) << ',';
        if (row.rate) os << format("%.4f", *row.rate);
        os << '\n';
    }
    return os.str();
}

std::string report_markdown(const ConvergenceReport& r) {
    const bool time = r.axis == StudyAxis::time;
    std::ostringstream os;
    os << "### " << r.label << "\n\n";
    os << "- problem: " << r.problem_name << "\n";
    os << "- exponent: " << r.exponent << "\n";
    os << "- scheme: " << scheme_name(r.scheme) << "\n";
    os << "- " << (time ? "J" : "N") << " = " << r.fixed << "\n\n";
    os << "| " << (time ? "N" : "J") << " | " << (time ? "E(tau,h)" : "G(tau,h)") << " | "
       << (time ? "rate^t" : "rate^x") << " |\n";
    os << "|---:|---:|---:|\n";
    for (const ReportRow& row : r.rows) {
        os << "| " << row.level << " | " << format("%.4e", row.error) << " | "
           << (row.rate ? format("%.2f", *row.rate) : std::string("*")) << " |\n";
    }
    return os.str();
}

std::string report_json(const ConvergenceReport& r) {
    nlohmann::ordered_json j;
    j["label"] = r.label;
    j["problem"] = r.problem_name;
    j["exponent"] = r.exponent;
    j["alpha0"] = r.alpha0;
    j["scheme"] = scheme_name(r.scheme);
    j["axis"] = axis_name(r.axis);
    j[r.axis == StudyAxis::time ? "J" : "N"] = r.fixed;
    j["rows"] = nlohmann::ordered_json::array();
    for (const ReportRow& row : r.rows) {
        nlohmann::ordered_json e;
        e["level_param"] = row.level;
        e["error"] = row.error;
        e["rate"] = row.rate ? nlohmann::ordered_json(*row.rate) : nlohmann::ordered_json(nullptr);
        j["rows"].push_back(e);
    }
    j["stability"] = nlohmann::ordered_json::array();
    for (const auto& [level, norm] : r.stability) {
        j["stability"].push_back({{"level_param", level}, {"max_lumped_norm", norm}});
    }
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------

double window_distance(const std::vector<double>& t, const std::vector<double>& a, const std::vector<double>& b,
                       std::array<double, 2> window) {
    if (t.size() != a.size() || t.size() != b.size()) throw Error(Stage::report, "trace lengths differ");
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < window[0] - 1e-12 || t[i] > window[1] + 1e-12) continue;
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += a[i] * a[i];
    }
    if (den == 0.0) throw Error(Stage::report, "window contains no nonzero samples");
    return std::sqrt(num / den);
}

namespace {

std::string column_name(double alpha) {
    std::string digits = format("%.2f", alpha);
    while (!digits.empty() && digits.back() == '0') digits.pop_back();
    std::string out = "u_";
    for (char c : digits) {
        if (c != '.') out.push_back(c);
    }
    return out;
}

}  // namespace

TransitionResult run_transition_demo(const TransitionConfig& c) {
    if (!(c.transition_time > 0.0 && c.transition_time <= c.T)) {
        throw Error(Stage::config, "transition time must lie in (0, T]");
    }
    ProblemSpec base;
    base.T = c.T;
    base.kappa = 1.0;
    base.domain.dim = 1;
    base.domain.x = {0.0, c.length};
    const double mid = 0.5 * c.length;
    base.source_profile.value = [mid](double x, double) { return std::exp(-0.5 * (x - mid) * (x - mid)); };
    base.source_time = TemporalFactor::exponential(c.source_rate);

    const Mesh mesh = make_mesh(base.domain, c.J);
    const double pos = (c.probe_x - base.domain.x[0]) / mesh.hx;
    const int node = static_cast<int>(std::lround(pos));
    if (std::abs(pos - node) > 1e-9 || node < 1 || node > c.J - 1) {
        throw Error(Stage::config, "probe point is not an interior mesh node");
    }

    std::array<ProblemSpec, 3> problems = {base, base, base};
    problems[0].exponent = ExponentFunction::constant(c.alpha_high, c.T);
    problems[0].name = "constant " + format("%.2f", c.alpha_high);
    problems[1].exponent = ExponentFunction::constant(c.alpha_low, c.T);
    problems[1].name = "constant " + format("%.2f", c.alpha_low);
    problems[2].exponent = ExponentFunction::transition(c.alpha_low, c.alpha_high, c.transition_time, c.T);
    problems[2].name = "transition";

    TransitionResult r;
    r.high_column = column_name(c.alpha_high);
    r.low_column = column_name(c.alpha_low);
    std::array<std::vector<double>*, 3> traces = {&r.u_high, &r.u_low, &r.u_var};
    for (std::size_t k = 0; k < 3; ++k) {
        const SolutionHistory h = run(problems[k], mesh, c.N, c.scheme, c.options);
        traces[k]->resize(static_cast<std::size_t>(c.N) + 1);
        for (int n = 0; n <= c.N; ++n) (*traces[k])[static_cast<std::size_t>(n)] = h.solution(n)[node - 1];
    }
    r.t.resize(static_cast<std::size_t>(c.N) + 1);
    for (int n = 0; n <= c.N; ++n) r.t[static_cast<std::size_t>(n)] = n * (c.T / c.N);

    r.early = {window_distance(r.t, r.u_var, r.u_high, c.early_window),
               window_distance(r.t, r.u_var, r.u_low, c.early_window)};
    r.late = {window_distance(r.t, r.u_var, r.u_high, c.late_window),
              window_distance(r.t, r.u_var, r.u_low, c.late_window)};
    return r;
}

std::string transition_csv(const TransitionResult& r) {
    std::ostringstream os;
    os << "t," << r.high_column << ',' << r.low_column << ",u_var\n";
    for (std::size_t i = 0; i < r.t.size(); ++i) {
        os << format("%.10g", r.t[i]) << ',' << format("%.12e", r.u_high[i]) << ',' << format("%.12e", r.u_low[i])
           << ',' << format("%.12e", r.u_var[i]) << '\n';
    }
    return os.str();
}

}  // namespace vfdw
