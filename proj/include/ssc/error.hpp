#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace ssc {

/// Base exception for every failure the pipeline reports. `code()` is a
/// stable machine-readable tag such as "CYCLE" or "DIVIDE_BY_ZERO".
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

} // namespace ssc
