#pragma once

// Dense Hermitian matrices and the cyclic Jacobi eigensolver for small dimensions.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "susychain/errors.hpp"
#include "susychain/numcore/small_matrix.hpp"

namespace susychain {

inline constexpr double kHermitianTolerance = 1e-12;

class HermitianMatrix {
 public:
  /// Row-major entries. Rejects input whose asymmetry exceeds 1e-12 * max(1, max|M_ij|).
  HermitianMatrix(std::size_t dimension, std::vector<cplx> entries)
      : n_(dimension), m_(std::move(entries)) {
    if (n_ == 0) throw ParameterError("HermitianMatrix: dimension must be positive");
    if (m_.size() != n_ * n_) throw ParameterError("HermitianMatrix: entry count mismatch");
    double scale = 1.0;
    for (const auto& v : m_) {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw NumericalError("HermitianMatrix: non-finite entry");
      scale = std::max(scale, std::abs(v));
    }
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = i; j < n_; ++j) {
        const double asym = std::abs((*this)(i, j) - std::conj((*this)(j, i)));
        if (asym > kHermitianTolerance * scale) throw NonHermitianError(i, j, asym);
      }
    }
  }

  explicit HermitianMatrix(const Mat3c& m) : HermitianMatrix(3, flatten(m)) {}

  std::size_t dimension() const noexcept { return n_; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return m_[i * n_ + j]; }
  const std::vector<cplx>& entries() const noexcept { return m_; }

  /// Largest absolute row sum.
  double norm_inf() const {
    double best = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n_; ++j) s += std::abs((*this)(i, j));
      best = std::max(best, s);
    }
    return best;
  }

 private:
  static std::vector<cplx> flatten(const Mat3c& m) {
    std::vector<cplx> out;
    out.reserve(9);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) out.push_back(m(i, j));
    return out;
  }

  std::size_t n_;
  std::vector<cplx> m_;
};

/// Eigen-decomposition; eigenvectors stored column-major (vectors[k] is the k-th eigenvector).
struct EigenSystem {
  std::vector<double> values;
  std::vector<std::vector<cplx>> vectors;
};

inline constexpr std::size_t kMaxSmallDimension = 8;

/// Cyclic complex Jacobi. Eigenvalues ascending; eigenvectors orthonormal.
inline EigenSystem eigh_small(const HermitianMatrix& m) {
  const std::size_t n = m.dimension();
  if (n > kMaxSmallDimension) {
    throw ParameterError("eigh_small: dimension " + std::to_string(n) + " exceeds 8");
  }
  std::vector<cplx> a = m.entries();
  std::vector<cplx> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
  auto A = [&](std::size_t i, std::size_t j) -> cplx& { return a[i * n + j]; };
  auto V = [&](std::size_t i, std::size_t j) -> cplx& { return v[i * n + j]; };

  double fro = 0.0;
  for (const auto& x : a) fro += std::norm(x);
  fro = std::sqrt(fro);
  if (fro == 0.0) fro = 1.0;

  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::norm(A(p, q));
    if (std::sqrt(off) <= 1e-17 * fro) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = std::abs(A(p, q));
        if (apq <= 1e-300) continue;
        const cplx phase = A(p, q) / apq;  // A(p,q) = apq * phase
        const double app = A(p, p).real();
        const double aqq = A(q, q).real();
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // J acts on columns p,q: col_p' = c col_p - s conj(phase) col_q, col_q' = s phase col_p + c col_q
        const cplx sp = s * phase;
        const cplx spc = s * std::conj(phase);
        for (std::size_t k = 0; k < n; ++k) {
          const cplx akp = A(k, p), akq = A(k, q);
          A(k, p) = c * akp - spc * akq;
          A(k, q) = sp * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const cplx apk = A(p, k), aqk = A(q, k);
          A(p, k) = c * apk - sp * aqk;
          A(q, k) = spc * apk + c * aqk;
        }
        A(p, q) = 0.0;
        A(q, p) = 0.0;
        A(p, p) = A(p, p).real();
        A(q, q) = A(q, q).real();
        for (std::size_t k = 0; k < n; ++k) {
          const cplx vkp = V(k, p), vkq = V(k, q);
          V(k, p) = c * vkp - spc * vkq;
          V(k, q) = sp * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return A(i, i).real() < A(j, j).real(); });
  EigenSystem out;
  for (std::size_t idx : order) {
    out.values.push_back(A(idx, idx).real());
    std::vector<cplx> col(n);
    for (std::size_t k = 0; k < n; ++k) col[k] = V(k, idx);
    out.vectors.push_back(std::move(col));
  }
  return out;
}

/// max_k ||M v_k - lambda_k v_k||_inf over all returned pairs.
inline double eigen_residual(const HermitianMatrix& m, const EigenSystem& es) {
  const std::size_t n = m.dimension();
  double worst = 0.0;
  for (std::size_t k = 0; k < es.values.size(); ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      cplx r = -es.values[k] * es.vectors[k][i];
      for (std::size_t j = 0; j < n; ++j) r += m(i, j) * es.vectors[k][j];
      worst = std::max(worst, std::abs(r));
    }
  }
  return worst;
}

/// max |<v_i, v_j> - delta_ij|.
inline double orthonormality_defect(const EigenSystem& es) {
  double worst = 0.0;
  for (std::size_t i = 0; i < es.vectors.size(); ++i) {
    for (std::size_t j = 0; j < es.vectors.size(); ++j) {
      cplx dot = 0.0;
      for (std::size_t k = 0; k < es.vectors[i].size(); ++k) dot += std::conj(es.vectors[i][k]) * es.vectors[j][k];
      worst = std::max(worst, std::abs(dot - (i == j ? 1.0 : 0.0)));
    }
  }
  return worst;
}

}  // namespace susychain
