#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "vfdw/schemes.hpp"

namespace vfdw {

enum class StudyAxis { time, space };

const char* axis_name(StudyAxis a);

/// One refinement study: the free parameter (N for time, J for space) runs through `levels`,
/// each entry double the previous; the other parameter is held at `fixed`.
struct StudySpec {
    std::string label;
    ProblemSpec problem;
    Scheme scheme = Scheme::alpha0_order;
    StudyAxis axis = StudyAxis::time;
    int fixed = 16;
    std::vector<int> levels;
    RunOptions options;
    int threads = 1;

    void validate() const;
};

struct ReportRow {
    int level = 0;
    double error = 0.0;
    std::optional<double> rate;  // log2(previous error / error); absent on the first row
};

struct ConvergenceReport {
    std::string label;
    std::string problem_name;
    std::string exponent;
    Scheme scheme = Scheme::alpha0_order;
    StudyAxis axis = StudyAxis::time;
    double alpha0 = 0.0;
    int fixed = 0;
    std::vector<ReportRow> rows;
    /// max over steps of the lumped norm of U^n, for every run of the study (ascending refinement)
    std::vector<std::pair<int, double>> stability;

    std::optional<double> final_rate() const;
};

/// Lumped distance between final states: runs at (J, N) and (J, 2N).
double self_error_time(const ProblemSpec& problem, Scheme scheme, int J, int N, const RunOptions& options = {});

/// Lumped distance between final states at the coarse nodes: runs at (J, N) and (2J, N).
double self_error_space(const ProblemSpec& problem, Scheme scheme, int J, int N, const RunOptions& options = {});

/// Lumped norm (coarse mesh widths) of coarse - fine restricted to the coarse nodes; fine has 2J subdivisions.
double restricted_distance(const FemSpace& coarse, const Vector& u_coarse, const Vector& u_fine);

/// Runs levels.size() + 1 schemes (the finer run of each pair is the coarser run of the next).
ConvergenceReport run_study(const StudySpec& spec);

std::string report_csv(const ConvergenceReport& r);
std::string report_markdown(const ConvergenceReport& r);
std::string report_json(const ConvergenceReport& r);

struct TransitionConfig {
    double T = 15.0;
    double length = 2.0;  // domain (0, length)
    int J = 128;
    int N = 512;
    double alpha_high = 1.9;
    double alpha_low = 1.4;
    double transition_time = 1.0;
    double probe_x = 1.0;
    double source_rate = 1.0;
    Scheme scheme = Scheme::alpha0_order;
    RunOptions options;
    std::array<double, 2> early_window{0.0, 1.0};
    std::array<double, 2> late_window{10.0, 15.0};
};

struct WindowDistances {
    double to_high = 0.0;  // relative lumped distance of the variable trace to the alpha_high trace
    double to_low = 0.0;
};

struct TransitionResult {
    std::string high_column = "u_19";
    std::string low_column = "u_14";
    std::vector<double> t;
    std::vector<double> u_high;
    std::vector<double> u_low;
    std::vector<double> u_var;
    WindowDistances early;
    WindowDistances late;
};

/// Source exp(-rate t) exp(-(x - x_mid)^2 / 2), zero initial data, three exponents:
/// constant alpha_high, constant alpha_low, and a transition from alpha_high to alpha_low over
/// [0, transition_time]. Traces are sampled at the mesh node probe_x.
TransitionResult run_transition_demo(const TransitionConfig& config);

/// Columns t, <high_column>, <low_column>, u_var (one row per time level).
std::string transition_csv(const TransitionResult& r);

/// sqrt(sum over window of (a - b)^2) / sqrt(sum over window of a^2).
double window_distance(const std::vector<double>& t, const std::vector<double>& a, const std::vector<double>& b,
                       std::array<double, 2> window);

}  // namespace vfdw
