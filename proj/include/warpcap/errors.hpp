#pragma once

#include <stdexcept>
#include <string>

namespace warpcap {

// Argument outside the mathematical domain of an operation
// (non-positive radius, reversed interval, exponent out of range, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed textual input (manifold descriptions, scenario files).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  ParseError(const std::string& what, int line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_ = 0;
};

// Adaptive quadrature could not certify the requested tolerance.  Carries the
// best estimate so callers can decide whether to degrade gracefully.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double best_estimate, double err_estimate)
      : std::runtime_error(what), best_(best_estimate), err_(err_estimate) {}
  double best_estimate() const { return best_; }
  double err_estimate() const { return err_; }

 private:
  double best_;
  double err_;
};

}  // namespace warpcap
