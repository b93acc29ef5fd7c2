#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cpwq {

// Thrown by file readers. Carries the 1-based line (or data row) at which
// parsing failed; the message already includes it.
class parse_error : public std::runtime_error {
public:
    parse_error(const std::string& message, std::size_t line)
        : std::runtime_error(message + " (line " + std::to_string(line) + ")"),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

inline void check_positive(double value, const char* name) {
    if (!(value > 0.0))
        throw std::domain_error(std::string(name) + " must be positive");
}

inline void check_nonnegative(double value, const char* name) {
    if (!(value >= 0.0))
        throw std::domain_error(std::string(name) + " must be nonnegative");
}

} // namespace cpwq
