#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "susychain/errors.hpp"

namespace susychain {

struct QuadRoots {
  std::vector<double> roots;  // ascending, 0..2 entries
  double discriminant = 0.0;  // p1^2 - 4 p2 p0; 0 for the linear case
};

/// Real roots of p2*y^2 + p1*y + p0. Uses the cancellation-free pair q/p2, p0/q.
inline QuadRoots quad_roots(double p2, double p1, double p0) {
  if (p2 == 0.0 && p1 == 0.0 && p0 == 0.0) {
    throw ParameterError("quad_roots: all coefficients are zero");
  }
  QuadRoots out;
  if (p2 == 0.0) {
    if (p1 != 0.0) out.roots.push_back(-p0 / p1);
    return out;
  }
  out.discriminant = p1 * p1 - 4.0 * p2 * p0;
  if (out.discriminant < 0.0) return out;
  if (out.discriminant == 0.0) {
    out.roots.push_back(-p1 / (2.0 * p2));
    return out;
  }
  const double sq = std::sqrt(out.discriminant);
  const double q = -0.5 * (p1 + std::copysign(sq, p1));
  out.roots = {q / p2, p0 / q};
  std::sort(out.roots.begin(), out.roots.end());
  return out;
}

}  // namespace susychain
