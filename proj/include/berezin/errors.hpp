#pragma once

#include <stdexcept>
#include <string>

namespace berezin {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unsupported group, malformed experiment configuration, bad CLI input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation
/// (non-dominant weight, non-unit vector, degenerate tangent pair, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numerical self-check failed (e.g. a Gram matrix that is not PSD).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// File could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// The quadrature rule is too coarse for the requested integrand.
class QuadratureError : public ConfigError {
 public:
  QuadratureError(const std::string& what, double defect, int suggested_k_max,
                  int suggested_degree)
      : ConfigError(what),
        defect_(defect),
        suggested_k_max_(suggested_k_max),
        suggested_degree_(suggested_degree) {}

  double defect() const noexcept { return defect_; }
  int suggested_k_max() const noexcept { return suggested_k_max_; }
  int suggested_degree() const noexcept { return suggested_degree_; }

 private:
  double defect_;
  int suggested_k_max_;
  int suggested_degree_;
};

}  // namespace berezin
