#pragma once

#include <cstddef>

namespace knnmt {

// Squared Euclidean distance, float accumulation. The omp-simd pragma
// licenses reassociation so the reduction vectorizes; the lane order is
// fixed at compile time, so results are deterministic for a given build.
inline float squared_l2(const float* a, const float* b, std::size_t n) {
  float acc = 0.0f;
#pragma omp simd reduction(+ : acc)
  for (std::size_t i = 0; i < n; ++i) {
    const float d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

// Double-accumulation variant used by batch jobs (pruning) and test oracles.
inline double squared_l2_f64(const float* a, const float* b, std::size_t n) {
  double acc = 0.0;
#pragma omp simd reduction(+ : acc)
  for (std::size_t i = 0; i < n; ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    acc += d * d;
  }
  return acc;
}

}  // namespace knnmt
