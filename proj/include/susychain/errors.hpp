#pragma once

#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace susychain {

/// Short %g rendering for messages (std::to_string prints 1e-8 as 0.000000).
inline std::string num_str(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user-supplied parameters or configuration (CLI exit code 2).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure: singular transformation, non-convergence, non-finite data (CLI exit code 3).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class NonHermitianError : public NumericalError {
 public:
  NonHermitianError(std::size_t row, std::size_t col, double asymmetry)
      : NumericalError("matrix is not Hermitian: |M(" + std::to_string(row) + "," +
                       std::to_string(col) + ") - conj(M(" + std::to_string(col) + "," +
                       std::to_string(row) + "))| = " + num_str(asymmetry)),
        row_(row),
        col_(col),
        asymmetry_(asymmetry) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }
  double asymmetry() const noexcept { return asymmetry_; }

 private:
  std::size_t row_;
  std::size_t col_;
  double asymmetry_;
};

/// A position-dependent quantity became singular (vanishing determinant or denominator).
class SingularError : public NumericalError {
 public:
  SingularError(const std::string& what, double x)
      : NumericalError(what + " at x = " + num_str(x)), x_(x) {}

  double x() const noexcept { return x_; }

 private:
  double x_;
};

}  // namespace susychain
