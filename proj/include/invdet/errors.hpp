#pragma once

#include <stdexcept>

namespace invdet {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Leading pivot is too small to divide by.
class PivotZero : public Error {
 public:
  using Error::Error;
};

// Some 1 + (row sum) vanishes; the closed-form product has a pole there.
class RowSumPole : public Error {
 public:
  using Error::Error;
};

// A phase vector entry is not on the unit circle.
class NonUnitPhase : public Error {
 public:
  using Error::Error;
};

// Input lies outside an operation's stated domain.
class DomainViolation : public Error {
 public:
  using Error::Error;
};

// Matrix fails the proximity condition the operation requires.
class GateViolation : public Error {
 public:
  using Error::Error;
};

// An image coordinate nearly vanished on the integration torus.
class NearPole : public Error {
 public:
  using Error::Error;
};

// Requested evaluation count exceeds the configured budget.
class CostGuard : public Error {
 public:
  using Error::Error;
};

// Malformed input file or configuration.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace invdet
