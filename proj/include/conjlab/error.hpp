#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace conjlab {

// Failure category, mapped to process exit codes by the CLI:
// usage -> 2, validation -> 3, io -> 4.
enum class ErrorKind { Usage, Validation, Io };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), kind_(kind), code_(std::move(code)) {}

    ErrorKind kind() const noexcept { return kind_; }

    // Stable machine-readable code, e.g. "NotConvex", "NotCoprime", "IoFailure".
    const std::string& code() const noexcept { return code_; }

private:
    ErrorKind kind_;
    std::string code_;
};

[[noreturn]] inline void fail_validation(std::string code, const std::string& message) {
    throw Error(ErrorKind::Validation, std::move(code), message);
}

[[noreturn]] inline void fail_io(std::string code, const std::string& message) {
    throw Error(ErrorKind::Io, std::move(code), message);
}

[[noreturn]] inline void fail_usage(std::string code, const std::string& message) {
    throw Error(ErrorKind::Usage, std::move(code), message);
}

}  // namespace conjlab
