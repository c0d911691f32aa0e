#pragma once

#include <stdexcept>
#include <string>

namespace pcolor {

/// A value fell outside the domain of an operation or violated a type
/// invariant (nonpositive tristimulus, empty wavelength overlap, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Pooled covariance is numerically singular and no fallback was requested.
class SingularCovarianceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Not enough observations for the requested statistic.
class InsufficientSampleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. `line()` is 1-based, 0 when not line-specific.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line == 0 ? what
                                     : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Image could not be decoded.
class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pcolor
