#pragma once

#include <stdexcept>
#include <string>

namespace fcl {

/// Failure categories. The CLI maps them onto process exit codes.
enum class ErrorKind {
    config,        ///< malformed model / parameters (exit 2)
    invalid_code,  ///< code word index out of range for its level
    domain,        ///< argument outside the operation's domain
    numeric,       ///< divergence, non-summable series, quadrature failure (exit 3)
    resolution,    ///< radius below what the grid can resolve (exit 3)
    bounds,        ///< geometry outside the grid rectangle
    empty_set,     ///< operation needs a nonempty input
    depth_limit,   ///< construction needs more levels than allowed (exit 4)
    unsupported,   ///< order or mode not provided
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class DepthLimitError : public Error {
public:
    DepthLimitError(int required, int cap)
        : Error(ErrorKind::depth_limit, "required depth " + std::to_string(required) +
                                            " exceeds the configured maximum " + std::to_string(cap)),
          required_(required) {}
    int required_depth() const noexcept { return required_; }

private:
    int required_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
    if (!cond) fail(kind, what);
}

}  // namespace fcl
