#pragma once

// Fixed-size 3x3 complex algebra used pointwise by the continuum and Darboux code.

#include <array>
#include <cmath>
#include <complex>

namespace susychain {

using cplx = std::complex<double>;
using Vec3c = std::array<cplx, 3>;

struct Mat3c {
  std::array<std::array<cplx, 3>, 3> a{};

  cplx& operator()(int i, int j) { return a[i][j]; }
  const cplx& operator()(int i, int j) const { return a[i][j]; }

  static Mat3c identity() {
    Mat3c m;
    for (int i = 0; i < 3; ++i) m(i, i) = 1.0;
    return m;
  }

  Mat3c adjoint() const {
    Mat3c m;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m(i, j) = std::conj(a[j][i]);
    return m;
  }

  cplx det() const {
    return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
           a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
           a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  }

  /// Transposed cofactor matrix; M * adjugate() == det() * 1.
  Mat3c adjugate() const {
    Mat3c c;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const int r0 = (j + 1) % 3, r1 = (j + 2) % 3;
        const int c0 = (i + 1) % 3, c1 = (i + 2) % 3;
        c(i, j) = a[r0][c0] * a[r1][c1] - a[r0][c1] * a[r1][c0];
      }
    }
    return c;
  }

  /// Largest absolute row sum.
  double norm_inf() const {
    double best = 0.0;
    for (const auto& row : a) best = std::max(best, std::abs(row[0]) + std::abs(row[1]) + std::abs(row[2]));
    return best;
  }

  /// Largest entry modulus.
  double max_abs() const {
    double best = 0.0;
    for (const auto& row : a)
      for (const auto& v : row) best = std::max(best, std::abs(v));
    return best;
  }

  friend Mat3c operator*(const Mat3c& x, const Mat3c& y) {
    Mat3c m;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m(i, j) = x(i, 0) * y(0, j) + x(i, 1) * y(1, j) + x(i, 2) * y(2, j);
    return m;
  }
  friend Vec3c operator*(const Mat3c& x, const Vec3c& v) {
    Vec3c r;
    for (int i = 0; i < 3; ++i) r[i] = x(i, 0) * v[0] + x(i, 1) * v[1] + x(i, 2) * v[2];
    return r;
  }
  friend Mat3c operator+(Mat3c x, const Mat3c& y) {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) x(i, j) += y(i, j);
    return x;
  }
  friend Mat3c operator-(Mat3c x, const Mat3c& y) {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) x(i, j) -= y(i, j);
    return x;
  }
  friend Mat3c operator*(cplx s, Mat3c x) {
    for (auto& row : x.a)
      for (auto& v : row) v *= s;
    return x;
  }
};

inline Vec3c operator+(Vec3c x, const Vec3c& y) {
  for (int i = 0; i < 3; ++i) x[i] += y[i];
  return x;
}
inline Vec3c operator-(Vec3c x, const Vec3c& y) {
  for (int i = 0; i < 3; ++i) x[i] -= y[i];
  return x;
}
inline Vec3c operator*(cplx s, Vec3c x) {
  for (auto& v : x) v *= s;
  return x;
}

inline double norm_inf(const Vec3c& v) {
  return std::max({std::abs(v[0]), std::abs(v[1]), std::abs(v[2])});
}

/// Kinetic matrix of the Dirac-type operators: couples the first two components only.
inline Mat3c gamma_matrix() {
  Mat3c g;
  g(0, 1) = 1.0;
  g(1, 0) = 1.0;
  return g;
}

/// Elementwise derivative helper: -i * gamma * v
inline Vec3c minus_i_gamma(const Vec3c& v) {
  const cplx mi(0.0, -1.0);
  return {mi * v[1], mi * v[0], 0.0};
}

}  // namespace susychain
