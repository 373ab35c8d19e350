#pragma once

#include <stdexcept>
#include <string>

namespace bai {

// Input outside a function's mathematical domain (non-positive sigma,
// non-finite argument, probability outside (0,1), ...).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// A call that is well-formed numerically but not allowed by the contract of
// the operation (e.g. asking the exact sampler for an adaptive rule).
class UsageError : public std::invalid_argument {
 public:
  explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace bai
