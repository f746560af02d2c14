#pragma once

#include <stdexcept>
#include <string>

namespace vfdw {

/// Pipeline stage a failure is attributed to. The CLI and the C API report it.
enum class Stage {
    config,
    exponent,
    weights,
    assembly,
    solve,
    report,
};

const char* stage_name(Stage stage) noexcept;

class Error : public std::runtime_error {
public:
    Error(Stage stage, const std::string& message)
        : std::runtime_error(message), stage_(stage) {}

    Stage stage() const noexcept { return stage_; }

private:
    Stage stage_;
};

}  // namespace vfdw
