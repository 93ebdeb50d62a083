#pragma once

#include <stdexcept>
#include <string>

namespace bubblekit {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidParam : Error { using Error::Error; };
struct ConstructionError : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct DivergentSum : Error { using Error::Error; };
struct NonFiniteSample : Error { using Error::Error; };
struct BoxError : Error { using Error::Error; };
struct BoxEscape : Error { using Error::Error; };
struct SingularHessian : Error { using Error::Error; };
struct SuiteFailure : Error { using Error::Error; };

}  // namespace bubblekit
