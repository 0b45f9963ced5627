#pragma once

// Banded Hermitian matrices and their full eigen-decomposition.
//
// Algorithm: band-preserving Givens reduction to Hermitian tridiagonal form (bulge chasing),
// diagonal phase scaling to a real symmetric tridiagonal, then implicit QL with Wilkinson
// shifts. Work is O(n^2 b) for eigenvalues; eigenvectors add O(n^3).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "susychain/errors.hpp"
#include "susychain/numcore/small_matrix.hpp"

namespace susychain {

class BandedHermitian {
 public:
  BandedHermitian(std::size_t dimension, std::size_t bandwidth)
      : n_(dimension), b_(bandwidth), lower_((bandwidth + 1) * dimension, 0.0) {
    if (dimension == 0) throw ParameterError("BandedHermitian: dimension must be positive");
  }

  std::size_t dimension() const noexcept { return n_; }
  std::size_t bandwidth() const noexcept { return b_; }

  /// Entry (i, j); zero outside the band.
  cplx operator()(std::size_t i, std::size_t j) const {
    if (i >= n_ || j >= n_) throw ParameterError("BandedHermitian: index out of range");
    if (i >= j) return i - j <= b_ ? lower_[(i - j) * n_ + j] : cplx{};
    return j - i <= b_ ? std::conj(lower_[(j - i) * n_ + i]) : cplx{};
  }

  /// Sets M(i,j) and M(j,i) = conj(value). Diagonal values must be real.
  void set(std::size_t i, std::size_t j, cplx value) { slot(i, j) = stored(i, j, value); }

  /// Adds to M(i,j) (and its Hermitian mirror).
  void add(std::size_t i, std::size_t j, cplx value) { slot(i, j) += stored(i, j, value); }

  /// Stored diagonal d (0 = main), entries M(j+d, j) for j = 0..n-1-d.
  std::vector<cplx> diagonal(std::size_t d) const {
    if (d > b_) throw ParameterError("BandedHermitian: diagonal index exceeds bandwidth");
    return {lower_.begin() + static_cast<std::ptrdiff_t>(d * n_),
            lower_.begin() + static_cast<std::ptrdiff_t>(d * n_ + n_ - d)};
  }

  bool all_finite() const {
    return std::all_of(lower_.begin(), lower_.end(), [](const cplx& v) {
      return std::isfinite(v.real()) && std::isfinite(v.imag());
    });
  }

  /// Largest absolute row sum.
  double norm_inf() const {
    std::vector<double> rows(n_, 0.0);
    for (std::size_t d = 0; d <= b_; ++d) {
      for (std::size_t j = 0; j + d < n_; ++j) {
        const double v = std::abs(lower_[d * n_ + j]);
        rows[j + d] += v;
        if (d != 0) rows[j] += v;
      }
    }
    return *std::max_element(rows.begin(), rows.end());
  }

  /// y = M x
  std::vector<cplx> multiply(const std::vector<cplx>& x) const {
    std::vector<cplx> y(n_, 0.0);
    for (std::size_t d = 0; d <= b_; ++d) {
      for (std::size_t j = 0; j + d < n_; ++j) {
        const cplx v = lower_[d * n_ + j];
        y[j + d] += v * x[j];
        if (d != 0) y[j] += std::conj(v) * x[j + d];
      }
    }
    return y;
  }

 private:
  cplx& slot(std::size_t i, std::size_t j) {
    if (i >= n_ || j >= n_) throw ParameterError("BandedHermitian: index out of range");
    const std::size_t d = i >= j ? i - j : j - i;
    if (d > b_) {
      throw ParameterError("BandedHermitian: entry (" + std::to_string(i) + "," + std::to_string(j) +
                           ") outside bandwidth " + std::to_string(b_));
    }
    return lower_[d * n_ + std::min(i, j)];
  }
  static cplx stored(std::size_t i, std::size_t j, cplx value) {
    if (i == j) {
      if (value.imag() != 0.0) throw NonHermitianError(i, i, 2.0 * std::abs(value.imag()));
      return value;
    }
    return i > j ? value : std::conj(value);
  }

  std::size_t n_;
  std::size_t b_;
  std::vector<cplx> lower_;  // diagonal d occupies [d*n, d*n + n - d)
};

/// Eigenvalues ascending; vectors[k] is the normalized k-th eigenvector (empty if not requested).
struct BandedEigen {
  std::vector<double> values;
  std::vector<std::vector<cplx>> vectors;
};

namespace detail {

// Lower-band working copy with room for one bulge diagonal.
class BandWork {
 public:
  BandWork(const BandedHermitian& m) : n_(m.dimension()), w_(m.bandwidth() + 1) {
    data_.assign((w_ + 1) * n_, 0.0);
    for (std::size_t d = 0; d <= m.bandwidth(); ++d) {
      auto diag = m.diagonal(d);
      std::copy(diag.begin(), diag.end(), data_.begin() + static_cast<std::ptrdiff_t>(d * n_));
    }
  }
  // lower-triangle access, requires i >= j and i - j <= w_
  cplx& at(std::size_t i, std::size_t j) { return data_[(i - j) * n_ + j]; }
  std::size_t width() const noexcept { return w_; }
  std::size_t size() const noexcept { return n_; }

 private:
  std::size_t n_;
  std::size_t w_;
  std::vector<cplx> data_;
};

// Unitary G = [[c, s], [-conj(s), c]] on rows (p, p+1); applies A <- G A G^H to the lower band.
inline void rotate(BandWork& a, std::size_t p, double c, cplx s) {
  const std::size_t q = p + 1;
  const std::size_t n = a.size();
  const std::size_t w = a.width();
  const cplx sc = std::conj(s);
  // columns left of the block
  const std::size_t j0 = q > w ? q - w : 0;
  for (std::size_t j = j0; j < p; ++j) {
    const cplx x = a.at(p, j);
    const cplx y = a.at(q, j);
    a.at(p, j) = c * x + s * y;
    a.at(q, j) = -sc * x + c * y;
  }
  // 2x2 block
  const double app = a.at(p, p).real();
  const double aqq = a.at(q, q).real();
  const cplx aqp = a.at(q, p);
  const cplx apq = std::conj(aqp);
  // (G B G^H) with B = [[app, apq], [aqp, aqq]]
  const cplx r00 = c * app + s * aqp, r01 = c * apq + s * aqq;
  const cplx r10 = -sc * app + c * aqp, r11 = -sc * apq + c * aqq;
  a.at(p, p) = (r00 * c + r01 * sc).real();
  a.at(q, p) = r10 * c + r11 * sc;
  a.at(q, q) = (-r10 * s + r11 * c).real();
  // rows below the block
  const std::size_t i1 = std::min(n - 1, p + w);
  for (std::size_t i = q + 1; i <= i1; ++i) {
    const cplx x = a.at(i, p);
    const cplx y = (i - q <= w) ? a.at(i, q) : cplx{};
    a.at(i, p) = c * x + sc * y;
    if (i - q <= w) a.at(i, q) = -s * x + c * y;
  }
}

// Rotation (c, s) on rows (p, p+1) that zeroes the lower entry of the column pair (x, y).
inline void givens(cplx x, cplx y, double& c, cplx& s) {
  const double ax = std::abs(x);
  if (ax == 0.0) {
    c = 0.0;
    s = 1.0;
    return;
  }
  const double r = std::hypot(ax, std::abs(y));
  c = ax / r;
  s = c * std::conj(y) / std::conj(x);
}

// Z <- Z G^H on columns (p, p+1); Z stored column-major.
inline void rotate_columns(std::vector<cplx>& z, std::size_t n, std::size_t p, double c, cplx s) {
  cplx* zp = z.data() + p * n;
  cplx* zq = zp + n;
  const cplx sc = std::conj(s);
  for (std::size_t k = 0; k < n; ++k) {
    const cplx x = zp[k], y = zq[k];
    zp[k] = c * x + sc * y;
    zq[k] = -s * x + c * y;
  }
}

// Implicit QL on a real symmetric tridiagonal (d: diagonal, e: sub-diagonal with e[n-1] unused).
// If z is non-empty, rotations are applied to its columns (column-major, n x n).
inline void tridiagonal_ql(std::vector<double>& d, std::vector<double>& e, std::vector<cplx>& z) {
  const std::size_t n = d.size();
  if (n < 2) return;
  const bool vectors = !z.empty();
  e[n - 1] = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
      }
      if (m != l) {
        if (++iter > 60) throw NumericalError("eigh_banded: QL iteration did not converge");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        std::size_t i = m;
        bool underflow = false;
        while (i-- > l) {
          const double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          if (vectors) {
            cplx* zi = z.data() + i * n;
            cplx* zi1 = zi + n;
            for (std::size_t k = 0; k < n; ++k) {
              const cplx a1 = zi1[k];
              const cplx a0 = zi[k];
              zi1[k] = s * a0 + c * a1;
              zi[k] = c * a0 - s * a1;
            }
          }
        }
        if (underflow) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

}  // namespace detail

/// Full spectrum of a banded Hermitian matrix, optionally with eigenvectors.
inline BandedEigen eigh_banded(const BandedHermitian& m, bool want_vectors = false) {
  if (!m.all_finite()) throw NumericalError("eigh_banded: non-finite entry");
  const std::size_t n = m.dimension();
  detail::BandWork a(m);
  std::vector<cplx> z;
  if (want_vectors) {
    z.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) z[i * n + i] = 1.0;
  }

  const std::size_t b = m.bandwidth();
  if (b >= 2) {
    for (std::size_t j = 0; j + 2 < n; ++j) {
      for (std::size_t k = std::min(b, n - 1 - j); k >= 2; --k) {
        std::size_t row = j + k;
        std::size_t col = j;
        // zero (row, col), then chase the bulge it creates at (row + b, row - 1)
        while (row < n) {
          const cplx y = a.at(row, col);
          if (y == cplx{}) break;
          double c;
          cplx s;
          detail::givens(a.at(row - 1, col), y, c, s);
          detail::rotate(a, row - 1, c, s);
          a.at(row, col) = 0.0;
          if (want_vectors) detail::rotate_columns(z, n, row - 1, c, s);
          col = row - 1;
          row += b;
        }
      }
    }
  }

  // Hermitian tridiagonal -> real symmetric tridiagonal via diagonal phases
  std::vector<double> d(n), e(n, 0.0);
  cplx phase = 1.0;
  std::vector<cplx> phases(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = a.at(i, i).real();
    if (i + 1 < n && b >= 1) {
      const cplx off = a.at(i + 1, i);
      const double mag = std::abs(off);
      e[i] = mag;
      phase = mag > 0.0 ? phase * (off / mag) : phase;
      phases[i + 1] = phase;
    }
  }
  if (want_vectors) {
    for (std::size_t i = 0; i < n; ++i) {
      cplx* col = z.data() + i * n;
      for (std::size_t k = 0; k < n; ++k) col[k] *= phases[i];
    }
  }
  detail::tridiagonal_ql(d, e, z);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return d[x] < d[y]; });
  BandedEigen out;
  out.values.reserve(n);
  for (std::size_t idx : order) out.values.push_back(d[idx]);
  if (want_vectors) {
    out.vectors.reserve(n);
    for (std::size_t idx : order) {
      std::vector<cplx> col(z.begin() + static_cast<std::ptrdiff_t>(idx * n),
                            z.begin() + static_cast<std::ptrdiff_t>(idx * n + n));
      double nrm = 0.0;
      for (const auto& v : col) nrm += std::norm(v);
      nrm = std::sqrt(nrm);
      for (auto& v : col) v /= nrm;
      out.vectors.push_back(std::move(col));
    }
  }
  return out;
}

/// max_k ||M v_k - lambda_k v_k||_inf (requires eigenvectors).
inline double eigen_residual(const BandedHermitian& m, const BandedEigen& es) {
  double worst = 0.0;
  for (std::size_t k = 0; k < es.vectors.size(); ++k) {
    const auto mv = m.multiply(es.vectors[k]);
    for (std::size_t i = 0; i < mv.size(); ++i) worst = std::max(worst, std::abs(mv[i] - es.values[k] * es.vectors[k][i]));
  }
  return worst;
}

}  // namespace susychain
