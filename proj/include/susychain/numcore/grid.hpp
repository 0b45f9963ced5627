#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "susychain/errors.hpp"

namespace susychain {

/// Uniform grid on [x_min, x_max] including both endpoints.
class Grid {
 public:
  Grid(double x_min, double x_max, std::size_t n_points)
      : x_min_(x_min), x_max_(x_max), n_points_(n_points) {
    if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_min < x_max)) {
      throw ParameterError("grid: require finite x_min < x_max");
    }
    if (n_points < 3) {
      throw ParameterError("grid: n_points must be >= 3, got " + std::to_string(n_points));
    }
    h_ = (x_max - x_min) / static_cast<double>(n_points - 1);
  }

  /// Symmetric grid [-half_width, half_width].
  static Grid symmetric(double half_width, std::size_t n_points) {
    return Grid(-half_width, half_width, n_points);
  }

  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  std::size_t size() const noexcept { return n_points_; }
  double h() const noexcept { return h_; }

  double x(std::size_t i) const noexcept {
    // last point pinned exactly to x_max
    return i + 1 == n_points_ ? x_max_ : x_min_ + static_cast<double>(i) * h_;
  }

  std::vector<double> points() const {
    std::vector<double> xs(n_points_);
    for (std::size_t i = 0; i < n_points_; ++i) xs[i] = x(i);
    return xs;
  }

  /// Index of the grid point closest to x (clamped to the grid).
  std::size_t nearest(double xv) const noexcept {
    if (xv <= x_min_) return 0;
    if (xv >= x_max_) return n_points_ - 1;
    auto i = static_cast<std::size_t>(std::lround((xv - x_min_) / h_));
    return i < n_points_ ? i : n_points_ - 1;
  }

  /// Same interval with 2(n-1)+1 points.
  Grid refined() const { return Grid(x_min_, x_max_, 2 * (n_points_ - 1) + 1); }

 private:
  double x_min_;
  double x_max_;
  std::size_t n_points_;
  double h_ = 0.0;
};

}  // namespace susychain
