#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fracsurf {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument violates an operation's precondition (index out of range,
/// point outside the domain, malformed descriptor).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A knot prefix is not strictly increasing; `index()` is the first offending
/// position in the user-supplied prefix.
class MonotonicityError : public DomainError {
 public:
  MonotonicityError(std::size_t index, const std::string& what)
      : DomainError(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// The fixed-point iteration hit max_iter with residual above tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> history)
      : Error(what), history_(std::move(history)) {}
  const std::vector<double>& residual_history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

/// The d_delta contraction certificate cannot be issued (sup of the cell
/// contraction factors is at least 1/2).
class CertificateRefused : public Error {
 public:
  using Error::Error;
};

/// Internal invariant broken, e.g. a pulled-back point left the domain.
class InconsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace fracsurf
