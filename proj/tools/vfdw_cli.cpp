#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "vfdw/vfdw.h"

namespace {

int report_failure(vfdw_status s) {
    std::fprintf(stderr, "error [%s]: %s\n", vfdw_status_name(s), vfdw_last_error());
    return static_cast<int>(s);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Variable-exponent fractional diffusion-wave solver: convergence tables and transition traces"};
    app.footer("Commands: convergence, transition, weights-dump, single-run");

    std::string command;
    std::string config_path;
    std::string preset;
    std::string alpha0;
    std::string scheme;
    std::string axis;
    std::string J;
    std::string N;
    std::string n_list;
    std::string j_list;
    std::string out_dir;
    std::string format;
    std::string threads;
    std::string rel_tol;
    std::string abar;
    std::string n;
    bool list_presets = false;

    app.add_option("command", command, "convergence | transition | weights-dump | single-run");
    app.add_option("--config", config_path, "JSON config file; flags override its fields");
    app.add_option("--preset", preset, "table1..table8, fig1, or example1, example2, example3a, example3b, example4");
    app.add_option("--alpha0", alpha0, "restrict a preset to one alpha0 block");
    app.add_option("--scheme", scheme, "alpha0-order | second-order");
    app.add_option("--axis", axis, "time | space");
    app.add_option("--J", J, "spatial subdivisions of time studies and single runs");
    app.add_option("--N", N, "time steps of space studies and single runs");
    app.add_option("--N-list", n_list, "comma-separated N levels of time studies");
    app.add_option("--J-list", j_list, "comma-separated J levels of space studies");
    app.add_option("--out-dir", out_dir, "output directory");
    app.add_option("--format", format, "comma-separated subset of csv, markdown, json");
    app.add_option("--threads", threads, "concurrent runs per study");
    app.add_option("--rel-tol", rel_tol, "relative tolerance of the g quadrature");
    app.add_option("--abar", abar, "weights-dump: alpha0 - 1");
    app.add_option("--n", n, "weights-dump: number of steps");
    app.add_flag("--list-presets", list_presets, "print the named presets and exit");

    CLI11_PARSE(app, argc, argv);

    if (list_presets) {
        for (size_t i = 0; i < vfdw_preset_count(); ++i) {
            std::printf("%-8s %s\n", vfdw_preset_name(i), vfdw_preset_description(i));
        }
        return 0;
    }

    vfdw_config* config = nullptr;
    vfdw_status s = VFDW_OK;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
            std::fprintf(stderr, "error [config]: cannot read '%s'\n", config_path.c_str());
            return VFDW_ERR_CONFIG;
        }
        std::stringstream text;
        text << in.rdbuf();
        s = vfdw_config_parse(text.str().c_str(), &config);
    } else {
        s = vfdw_config_new(&config);
    }
    if (s != VFDW_OK) return report_failure(s);

    const std::vector<std::pair<const char*, const std::string*>> overrides = {
        {"command", &command}, {"preset", &preset},   {"alpha0", &alpha0},   {"scheme", &scheme},
        {"axis", &axis},       {"J", &J},             {"N", &N},             {"N-list", &n_list},
        {"J-list", &j_list},   {"out-dir", &out_dir}, {"format", &format},   {"threads", &threads},
        {"rel-tol", &rel_tol}, {"abar", &abar},       {"n", &n},
    };
    for (const auto& [key, value] : overrides) {
        if (value->empty()) continue;
        s = vfdw_config_set(config, key, value->c_str());
        if (s != VFDW_OK) {
            vfdw_config_free(config);
            return report_failure(s);
        }
    }

    vfdw_result* result = nullptr;
    s = vfdw_config_execute(config, &result);
    vfdw_config_free(config);
    if (s != VFDW_OK) return report_failure(s);

    std::fputs(vfdw_result_summary(result), stdout);
    for (size_t i = 0; i < vfdw_result_file_count(result); ++i) std::printf("wrote %s\n", vfdw_result_file(result, i));
    vfdw_result_free(result);
    return 0;
}
