#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace sgsample {

/// Categories shared by the C++ exceptions and the C API status codes.
enum class ErrorKind {
  kInvalidArgument,
  kInputShape,
  kInvalidConfig,
  kNotPositiveDefinite,
  kDivergence,
  kLookup,
  kIo,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InvalidArgumentError : public Error {
 public:
  explicit InvalidArgumentError(const std::string& what) : Error(ErrorKind::kInvalidArgument, what) {}
};

class InputShapeError : public Error {
 public:
  explicit InputShapeError(const std::string& what) : Error(ErrorKind::kInputShape, what) {}
};

class InvalidConfigError : public Error {
 public:
  explicit InvalidConfigError(const std::string& what) : Error(ErrorKind::kInvalidConfig, what) {}
};

class LookupError : public Error {
 public:
  explicit LookupError(const std::string& what) : Error(ErrorKind::kLookup, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::kIo, what) {}
};

/// Cholesky failed at every jitter level. `pivot` is the first non-positive pivot
/// of the last attempt.
class NotPositiveDefiniteError : public Error {
 public:
  NotPositiveDefiniteError(const std::string& what, std::ptrdiff_t pivot)
      : Error(ErrorKind::kNotPositiveDefinite, what), pivot_(pivot) {}
  std::ptrdiff_t pivot() const noexcept { return pivot_; }

 private:
  std::ptrdiff_t pivot_;
};

/// Non-finite value inside an iterative solve. Carries the residual history up to
/// the failing iteration.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, int iteration, std::vector<double> trace)
      : Error(ErrorKind::kDivergence, what), iteration_(iteration), trace_(std::move(trace)) {}
  int iteration() const noexcept { return iteration_; }
  const std::vector<double>& trace() const noexcept { return trace_; }

 private:
  int iteration_;
  std::vector<double> trace_;
};

}  // namespace sgsample
