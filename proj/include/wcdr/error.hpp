#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wcdr {

enum class ErrorCode {
    invalid_argument,
    invalid_filter,
    dimension_mismatch,
    not_strongly_convex,
    factorization_failed,
    step_too_large,
    invalid_step,
    shifted_term_nonconvex,
    bound_inapplicable,
    degenerate_sampler,
    divergence,
    design_failure,
};

inline std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::invalid_filter: return "invalid-filter";
    case ErrorCode::dimension_mismatch: return "dimension-mismatch";
    case ErrorCode::not_strongly_convex: return "not-strongly-convex";
    case ErrorCode::factorization_failed: return "factorization-failed";
    case ErrorCode::step_too_large: return "step-too-large";
    case ErrorCode::invalid_step: return "invalid-step";
    case ErrorCode::shifted_term_nonconvex: return "shifted-term-nonconvex";
    case ErrorCode::bound_inapplicable: return "bound-inapplicable";
    case ErrorCode::degenerate_sampler: return "degenerate-sampler";
    case ErrorCode::divergence: return "divergence";
    case ErrorCode::design_failure: return "design-failure";
    }
    return "unknown";
}

/// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

namespace detail {

inline void require(bool cond, ErrorCode code, const std::string& what)
{
    if (!cond) throw Error(code, what);
}

} // namespace detail
} // namespace wcdr
