#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace frameavg {

// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// A scalar function was evaluated outside its domain (log of 0, s^{-1/2} on a kernel, ...).
class DomainError : public Error {
 public:
  DomainError(const std::string& what, double offending_value)
      : Error(what), offending_value_(offending_value) {}

  double offending_value() const noexcept { return offending_value_; }

 private:
  double offending_value_;
};

// Construction-time invariant failed (non-Hermitian input, trace not one, ...).
class InvariantError : public Error {
 public:
  InvariantError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::ptrdiff_t dim, double condition_estimate)
      : Error(what), dim_(dim), condition_estimate_(condition_estimate) {}

  std::ptrdiff_t dim() const noexcept { return dim_; }
  double condition_estimate() const noexcept { return condition_estimate_; }

 private:
  std::ptrdiff_t dim_;
  double condition_estimate_;
};

class OverflowError : public Error {
 public:
  using Error::Error;
};

// Hilbert-space dimension d^N exceeds the lattice guard.
class LatticeGuardError : public Error {
 public:
  LatticeGuardError(const std::string& what, int sites) : Error(what), sites_(sites) {}

  int sites() const noexcept { return sites_; }

 private:
  int sites_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace frameavg
