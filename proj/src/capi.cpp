#include "vfdw/vfdw.h"

#include <algorithm>
#include <memory>
#include <new>
#include <string>

#include "vfdw/config.hpp"
#include "vfdw/error.hpp"
#include "vfdw/exponent.hpp"
#include "vfdw/weights.hpp"

struct vfdw_config {
    vfdw::RunConfig config;
};

struct vfdw_result {
    vfdw::ExecutionResult result;
};

struct vfdw_exponent {
    vfdw::ExponentFunction f;
    std::unique_ptr<vfdw::GQuadrature> q;  // default tolerance, shared by concurrent callers
};

namespace {

thread_local std::string last_error;

vfdw_status status_of(vfdw::Stage s) {
    switch (s) {
        case vfdw::Stage::config: return VFDW_ERR_CONFIG;
        case vfdw::Stage::exponent: return VFDW_ERR_EXPONENT;
        case vfdw::Stage::weights: return VFDW_ERR_WEIGHTS;
        case vfdw::Stage::assembly: return VFDW_ERR_ASSEMBLY;
        case vfdw::Stage::solve: return VFDW_ERR_SOLVE;
        case vfdw::Stage::report: return VFDW_ERR_REPORT;
    }
    return VFDW_ERR_INTERNAL;
}

vfdw_status fail(vfdw_status s, const std::string& message) {
    last_error = message;
    return s;
}

template <typename F>
vfdw_status guarded(F&& f) {
    try {
        f();
        last_error.clear();
        return VFDW_OK;
    } catch (const vfdw::Error& e) {
        return fail(status_of(e.stage()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(VFDW_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(VFDW_ERR_INTERNAL, e.what());
    }
}

bool is_nonzero_stage(vfdw_status s) { return s >= VFDW_ERR_CONFIG && s <= VFDW_ERR_REPORT; }

}  // namespace

extern "C" {

const char* vfdw_last_error(void) { return last_error.c_str(); }

const char* vfdw_status_name(vfdw_status status) {
    switch (status) {
        case VFDW_OK: return "ok";
        case VFDW_ERR_INVALID_ARGUMENT: return "invalid argument";
        case VFDW_ERR_INTERNAL: return "internal";
        default: break;
    }
    if (is_nonzero_stage(status)) return vfdw::stage_name(static_cast<vfdw::Stage>(status - VFDW_ERR_CONFIG));
    return "unknown";
}

const char* vfdw_version(void) { return "1.0.0"; }

vfdw_status vfdw_config_new(vfdw_config** out) {
    if (!out) return fail(VFDW_ERR_INVALID_ARGUMENT, "null output pointer");
    return guarded([&] { *out = new vfdw_config{}; });
}

vfdw_status vfdw_config_parse(const char* text, vfdw_config** out) {
    if (!text || !out) return fail(VFDW_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] { *out = new vfdw_config{vfdw::parse_config(text)}; });
}

vfdw_status vfdw_config_set(vfdw_config* config, const char* key, const char* value) {
    if (!config || !key || !value) return fail(VFDW_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] { vfdw::set_option(config->config, key, value); });
}

vfdw_status vfdw_config_execute(const vfdw_config* config, vfdw_result** out) {
    if (!config || !out) return fail(VFDW_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] { *out = new vfdw_result{vfdw::execute(config->config)}; });
}

void vfdw_config_free(vfdw_config* config) { delete config; }

size_t vfdw_result_file_count(const vfdw_result* result) { return result ? result->result.files.size() : 0; }

const char* vfdw_result_file(const vfdw_result* result, size_t index) {
    if (!result || index >= result->result.files.size()) return nullptr;
    return result->result.files[index].c_str();
}

const char* vfdw_result_summary(const vfdw_result* result) { return result ? result->result.summary.c_str() : ""; }

void vfdw_result_free(vfdw_result* result) { delete result; }

size_t vfdw_preset_count(void) { return vfdw::preset_catalog().size(); }

const char* vfdw_preset_name(size_t index) {
    const auto& c = vfdw::preset_catalog();
    return index < c.size() ? c[index].name.c_str() : nullptr;
}

const char* vfdw_preset_description(size_t index) {
    const auto& c = vfdw::preset_catalog();
    return index < c.size() ? c[index].description.c_str() : nullptr;
}

vfdw_status vfdw_exponent_new(const char* family, const double* params, size_t param_count, double horizon,
                              vfdw_exponent** out) {
    if (!family || !out || (param_count > 0 && !params)) return fail(VFDW_ERR_INVALID_ARGUMENT, "null argument");
    const std::string fam = family;
    auto need = [&](size_t n) {
        if (param_count != n) {
            throw vfdw::Error(vfdw::Stage::exponent,
                              fam + " takes " + std::to_string(n) + " parameters, got " + std::to_string(param_count));
        }
    };
    return guarded([&] {
        vfdw::ExponentFunction f = vfdw::ExponentFunction::constant(1.5, 1.0);
        if (fam == "constant") {
            need(1);
            f = vfdw::ExponentFunction::constant(params[0], horizon);
        } else if (fam == "poly_offset") {
            need(3);
            f = vfdw::ExponentFunction::poly_offset(params[0], params[1], params[2], horizon);
        } else if (fam == "sine_offset") {
            need(2);
            f = vfdw::ExponentFunction::sine_offset(params[0], params[1], horizon);
        } else if (fam == "transition") {
            need(3);
            f = vfdw::ExponentFunction::transition(params[0], params[1], params[2], horizon);
        } else {
            throw vfdw::Error(vfdw::Stage::exponent, "unknown exponent family '" + fam + "'");
        }
        *out = new vfdw_exponent{f, std::make_unique<vfdw::GQuadrature>(f.alpha0())};
    });
}

vfdw_status vfdw_exponent_value(const vfdw_exponent* exponent, double t, double* out) {
    if (!exponent || !out) return fail(VFDW_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] { *out = exponent->f.value(t); });
}

vfdw_status vfdw_exponent_g(const vfdw_exponent* exponent, double t, double rel_tol, double* out) {
    if (!exponent || !out) return fail(VFDW_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        if (rel_tol <= 0.0 || rel_tol == exponent->q->rel_tol()) {
            *out = vfdw::eval_g(exponent->f, t, *exponent->q);
        } else {
            const vfdw::GQuadrature q(exponent->f.alpha0(), 8, rel_tol, 512);
            *out = vfdw::eval_g(exponent->f, t, q);
        }
    });
}

void vfdw_exponent_free(vfdw_exponent* exponent) { delete exponent; }

vfdw_status vfdw_cq_weights(double abar, size_t n, double* chi) {
    if (!chi || n == 0) return fail(VFDW_ERR_INVALID_ARGUMENT, "need n >= 1 and an output buffer");
    return guarded([&] {
        const auto w = vfdw::cq_weights(abar, static_cast<int>(n));
        std::copy(w.begin(), w.end(), chi);
    });
}

vfdw_status vfdw_correction_weights(double abar, size_t n, double* omega) {
    if (!omega || n == 0) return fail(VFDW_ERR_INVALID_ARGUMENT, "need n >= 1 and an output buffer");
    return guarded([&] {
        const auto chi = vfdw::cq_weights(abar, static_cast<int>(n));
        const auto w = vfdw::correction_weights(chi, abar, static_cast<int>(n));
        std::copy(w.begin(), w.end(), omega);
    });
}

vfdw_status vfdw_pi_weights(double abar, double tau, size_t n, double* pi_off, double* pi_diag) {
    if (!pi_off || !pi_diag || n == 0) return fail(VFDW_ERR_INVALID_ARGUMENT, "need n >= 1 and output buffers");
    return guarded([&] {
        const auto w = vfdw::pi_weights(abar, tau, static_cast<int>(n));
        std::copy(w.off.begin(), w.off.end(), pi_off);
        *pi_diag = w.diag;
    });
}

}  // extern "C"
