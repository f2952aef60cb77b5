#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dronepaint {

enum class ErrorCode {
    ConfigError,
    ParseError,
    InvalidFrame,
    DegenerateHand,
    ModelError,
    EmptyStroke,
    DegenerateStroke,
    CoincidentSource,
    DegenerateAnova,
    IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every library failure is reported through this type; `code()` carries the
// category the callers dispatch on (CLI exit codes, gateway error replies).
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

} // namespace dronepaint
