#pragma once

#include <random>

#include <Eigen/Dense>

#include "vdcsim/spatial.hpp"

namespace vdcsim::testutil {

inline std::mt19937_64 make_rng(std::uint64_t seed) {
  return std::mt19937_64(seed);
}

inline double uniform(std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

template <int R, int C>
Eigen::Matrix<double, R, C> random_matrix(std::mt19937_64& rng, double lo = -1.0,
                                          double hi = 1.0) {
  Eigen::Matrix<double, R, C> m;
  for (int r = 0; r < R; ++r) {
    for (int c = 0; c < C; ++c) {
      m(r, c) = uniform(rng, lo, hi);
    }
  }
  return m;
}

inline Vec3 random_vec3(std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  return random_matrix<3, 1>(rng, lo, hi);
}

inline Vec6 random_vec6(std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  return random_matrix<6, 1>(rng, lo, hi);
}

inline Mat3 random_rotation(std::mt19937_64& rng) {
  const Vec3 axis = random_vec3(rng).normalized();
  const double angle = uniform(rng, -3.0, 3.0);
  return Eigen::AngleAxisd(angle, axis).toRotationMatrix();
}

/// Symmetric positive definite with eigenvalues comfortably away from zero.
template <int N>
Eigen::Matrix<double, N, N> random_spd(std::mt19937_64& rng, double shift = 1.0) {
  const Eigen::Matrix<double, N, N> a = random_matrix<N, N>(rng);
  return a * a.transpose() +
         shift * Eigen::Matrix<double, N, N>::Identity();
}

}  // namespace vdcsim::testutil
