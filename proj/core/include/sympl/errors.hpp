#pragma once

#include <stdexcept>
#include <string>

namespace sympl {

// Domain error carrying a stable machine-readable code (used by the CLI error JSON).
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

[[noreturn]] inline void fail(const std::string& code, const std::string& message) {
    throw Error(code, code + ": " + message);
}

}  // namespace sympl
