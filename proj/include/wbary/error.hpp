#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace wbary {

/// Error with a stable machine-readable code ("BadWeights", "NotSPD", ...).
/// The CLI maps codes to exit statuses; library callers can switch on code().
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

    [[nodiscard]] const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

[[noreturn]] inline void fail(std::string code, const std::string& message) {
    throw Error(std::move(code), message);
}

inline void require(bool cond, const char* code, const std::string& message) {
    if (!cond) throw Error(code, message);
}

} // namespace wbary
