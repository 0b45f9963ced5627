#pragma once

// Finite-difference derivative and cumulative trapezoidal quadrature on a Grid.

#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "susychain/errors.hpp"
#include "susychain/numcore/grid.hpp"

namespace susychain {

namespace detail {
inline bool is_finite(double v) { return std::isfinite(v); }
inline bool is_finite(const std::complex<double>& v) {
  return std::isfinite(v.real()) && std::isfinite(v.imag());
}
}  // namespace detail

/// Second-order derivative: central stencil inside, one-sided second-order stencils at the ends.
/// Written as differences of samples so that constant input gives exact zeros.
template <typename T>
std::vector<T> diff_central(std::span<const T> f, const Grid& grid) {
  const std::size_t n = f.size();
  if (n < 3) throw ParameterError("diff_central: need at least 3 samples");
  if (n != grid.size()) throw ParameterError("diff_central: sample count does not match grid");
  const double inv2h = 1.0 / (2.0 * grid.h());
  std::vector<T> d(n);
  d[0] = (4.0 * (f[1] - f[0]) - (f[2] - f[0])) * inv2h;
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) * inv2h;
  d[n - 1] = ((f[n - 3] - f[n - 1]) - 4.0 * (f[n - 2] - f[n - 1])) * inv2h;
  return d;
}

template <typename T>
std::vector<T> diff_central(const std::vector<T>& f, const Grid& grid) {
  return diff_central(std::span<const T>(f), grid);
}

/// Cumulative trapezoidal antiderivative, anchored to zero at the grid point nearest x = 0.
template <typename T>
std::vector<T> integrate_cumulative(std::span<const T> f, const Grid& grid) {
  const std::size_t n = f.size();
  if (n < 3) throw ParameterError("integrate_cumulative: need at least 3 samples");
  if (n != grid.size()) throw ParameterError("integrate_cumulative: sample count does not match grid");
  for (std::size_t i = 0; i < n; ++i) {
    if (!detail::is_finite(f[i])) {
      throw SingularError("integrate_cumulative: non-finite sample", grid.x(i));
    }
  }
  const std::size_t anchor = grid.nearest(0.0);
  const double half_h = 0.5 * grid.h();
  std::vector<T> out(n, T{});
  for (std::size_t i = anchor + 1; i < n; ++i) out[i] = out[i - 1] + (f[i - 1] + f[i]) * half_h;
  for (std::size_t i = anchor; i-- > 0;) out[i] = out[i + 1] - (f[i] + f[i + 1]) * half_h;
  return out;
}

template <typename T>
std::vector<T> integrate_cumulative(const std::vector<T>& f, const Grid& grid) {
  return integrate_cumulative(std::span<const T>(f), grid);
}

/// Samples of a callable on the grid.
template <typename F>
auto sample(const Grid& grid, F&& fn) {
  using R = decltype(fn(0.0));
  std::vector<R> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = fn(grid.x(i));
  return out;
}

}  // namespace susychain
