#include "vfdw/error.hpp"

namespace vfdw {

const char* stage_name(Stage stage) noexcept {
    switch (stage) {
        case Stage::config: return "config";
        case Stage::exponent: return "exponent";
        case Stage::weights: return "weights";
        case Stage::assembly: return "assembly";
        case Stage::solve: return "solve";
        case Stage::report: return "report";
    }
    return "unknown";
}

}  // namespace vfdw
