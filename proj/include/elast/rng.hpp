#pragma once

#include <cstdint>
#include <random>

#include "elast/linalg.hpp"

namespace elast {

// Seeded random source used by every generator in the project.
//
// The engine is std::mt19937_64, whose output sequence is fully pinned by
// the C++ standard, and normal variates are produced by an explicit
// Box-Muller transform on top of it. std::normal_distribution is avoided
// on purpose: its algorithm is implementation-defined, which would break
// cross-toolchain reproducibility of seeded experiments.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; generates pairs and caches the spare.
  double normal();

  // Vector of iid standard normals.
  Vector normal_vector(Eigen::Index n);

  // Matrix of iid standard normals.
  Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols);

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace elast
