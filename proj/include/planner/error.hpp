#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace planner {

/// Machine-readable failure categories raised across the library.
enum class ErrorCode {
    InvalidArgument,
    IndexOutOfRange,
    InvalidConfig,
    RejectAlpha,
    DecodeInconsistent,
    NumericalBreakdown,
    ParseError,
    SchemaViolation,
    ValidationFailed,
    Io,
};

const char* to_string(ErrorCode code);

class PlannerError : public std::runtime_error {
public:
    PlannerError(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// One invariant violation. `code` is stable (e.g. NEGATIVE_CAPACITY), `path`
/// is a JSON pointer when the violation can be attributed to an input field.
struct Violation {
    std::string code;
    std::string message;
    std::string path;
};

using ValidationReport = std::vector<Violation>;

inline bool has_code(const ValidationReport& report, const std::string& code) {
    for (const auto& v : report)
        if (v.code == code)
            return true;
    return false;
}

}  // namespace planner
