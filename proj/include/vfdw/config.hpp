#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vfdw/harness.hpp"

namespace vfdw {

/// Named spatial data: "zero", "one", "sin_pi", "sin_2pi", "poly2" (x^2 (1-x)^2), "poly4" (x^4 (1-x)^4),
/// "x_pow_m1_4" (x^(-1/4), nodal only), "indicator_half" (indicator of (0, 1/2], nodal only),
/// "gaussian_mid" (exp(-(x - m)^2 / 2) around the domain midpoint). In 2D the tensor product is used.
SpatialFunction named_data(const std::string& name, const Domain& domain);
const std::vector<std::string>& data_names();

/// Example problems "example1", "example2", "example3a", "example3b", "example4" at the given alpha0.
ProblemSpec example_problem(const std::string& name, double alpha0);
const std::vector<std::string>& example_names();

struct PresetInfo {
    std::string name;
    std::string description;
};

/// Tables 1 to 8 and fig1.
const std::vector<PresetInfo>& preset_catalog();

/// Studies of a table preset ("table1" .. "table8") or of every table of an example preset
/// ("example1" .. "example4"), optionally restricted to one alpha0. Labels look like table1_a19.
std::vector<StudySpec> preset_studies(const std::string& preset, std::optional<double> alpha0 = std::nullopt);

Scheme parse_scheme(const std::string& text);
StudyAxis parse_axis(const std::string& text);

/// "a" followed by the digits of alpha0 with trailing zeros removed: 1.9 -> a19, 1.85 -> a185.
std::string alpha_tag(double alpha0);

enum class Command { convergence, transition, weights_dump, single_run };

const char* command_name(Command c);
Command parse_command(const std::string& text);

struct OutputFormats {
    bool csv = true;
    bool markdown = true;
    bool json = false;
};

/// One command and everything it needs. Built by parse_config and adjusted by set_option.
struct RunConfig {
    std::optional<Command> command;
    std::optional<std::string> preset;
    std::optional<double> alpha0;

    // custom problem, used when no preset is given
    std::optional<ProblemSpec> problem;

    std::optional<Scheme> scheme;
    std::optional<StudyAxis> axis;
    std::optional<int> J;
    std::optional<int> N;
    std::vector<int> N_list;  // levels of time studies
    std::vector<int> J_list;  // levels of space studies

    RunOptions options;
    int threads = 1;

    TransitionConfig transition;

    double weights_abar = 0.5;
    int weights_n = 16;

    std::string out_dir = ".";
    OutputFormats formats;
};

/// JSON document; see the README for the layout. Unknown keys are rejected.
/// Throws Error(Stage::config) naming the line (syntax) or the field path (validation).
RunConfig parse_config(const std::string& text);

/// Command-line style override: key in {command, preset, alpha0, scheme, axis, J, N, N-list, J-list,
/// out-dir, format, threads, rel-tol, abar, n}. Lists are comma separated.
void set_option(RunConfig& config, const std::string& key, const std::string& value);

/// Studies a convergence command runs, after presets, filters and overrides.
std::vector<StudySpec> resolve_studies(const RunConfig& config);

struct ExecutionResult {
    std::vector<std::string> files;  // written paths in creation order
    std::string summary;             // short human-readable digest
};

/// Runs the command and writes its artifacts under out_dir.
ExecutionResult execute(const RunConfig& config);

}  // namespace vfdw
