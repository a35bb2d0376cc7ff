#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace lcfg {

enum class ErrorKind {
  Domain,       // precondition on a numeric argument violated
  Shape,        // dimension mismatch
  Data,         // invalid data values (non-finite, empty)
  Format,       // malformed file
  Io,           // missing or unreadable file
  Numerical,    // an algorithm failed to converge
  Divergence,   // ODE state blew up
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorKind::Domain, what) {}
};

class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& what) : Error(ErrorKind::Shape, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

/// Malformed file; `offset` is the byte (or line, for text formats) where parsing failed.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : Error(ErrorKind::Format, what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double estimate, double error_estimate)
      : Error(ErrorKind::Numerical, what), estimate_(estimate), error_estimate_(error_estimate) {}
  double estimate() const noexcept { return estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double estimate_;
  double error_estimate_;
};

class DivergenceError : public Error {
 public:
  DivergenceError(std::size_t step, std::optional<std::size_t> sample = std::nullopt)
      : Error(ErrorKind::Divergence, describe(step, sample)), step_(step), sample_(sample) {}
  std::size_t step() const noexcept { return step_; }
  std::optional<std::size_t> sample() const noexcept { return sample_; }

 private:
  static std::string describe(std::size_t step, std::optional<std::size_t> sample) {
    std::string s = "integration diverged at step " + std::to_string(step);
    if (sample) s += " of sample " + std::to_string(*sample);
    return s;
  }
  std::size_t step_;
  std::optional<std::size_t> sample_;
};

}  // namespace lcfg
