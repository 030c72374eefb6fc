#pragma once

#include <Eigen/Dense>

namespace smms {

// Largest chart dimension supported. Small matrices are stack-allocated with
// this capacity so the ODE right-hand sides never touch the heap.
inline constexpr int kMaxDim = 6;

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;

// A point in the single global chart of a model.
using ChartPoint = Vec;

inline Vec make_vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

}  // namespace smms
