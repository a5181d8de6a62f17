#pragma once

// Seeded synthetic data generators and Monte-Carlo moment estimators.
// Identical seed + parameters give bit-identical datasets.

#include <cstdint>
#include <vector>

#include "elast/linalg.hpp"
#include "elast/rng.hpp"

namespace elast {

// Scalar offset alpha(x) added to labels; it cancels in y - alpha(x)
// everywhere it is consumed, so Zero is the default.
enum class AlphaSpec { Zero, L1Norm };

double alpha_eval(AlphaSpec alpha, const Vector& x);

// Diagonal feature family beta_{q,q}. Coordinate is the only built-in:
// beta_{q,q}(x) = x_q.
enum class BetaSpec { Coordinate };

struct DatasetReal {
  std::vector<Vector> x;
  std::vector<double> y;
  std::uint64_t seed = 0;

  int size() const { return static_cast<int>(x.size()); }
  int dim() const { return x.empty() ? 0 : static_cast<int>(x.front().size()); }
};

struct DatasetClass {
  std::vector<Vector> x;
  std::vector<int> labels;  // in [0, num_classes)
  int num_classes = 0;
  std::uint64_t seed = 0;

  int size() const { return static_cast<int>(x.size()); }
  int dim() const { return x.empty() ? 0 : static_cast<int>(x.front().size()); }
  std::vector<int> class_counts() const;
};

// Per-class feature vectors h_{k,i} with counts n_k and total N.
struct FeatureBank {
  std::vector<std::vector<Vector>> features;  // [class][i]

  int num_classes() const { return static_cast<int>(features.size()); }
  int total() const;
  int feature_dim() const;
};

// Isotropic Gaussian blobs, one per class: x = mean_k + sqrt(var_k) * N(0, I).
// Throws ParameterError on nonpositive variance or shape mismatch.
DatasetClass gaussian_blobs(int dims, const std::vector<Vector>& means,
                            const std::vector<double>& variances, int n_per_class,
                            std::uint64_t seed);

// Convenience: constant per-coordinate class means.
DatasetClass gaussian_blobs(int dims, const std::vector<double>& mean_scalars,
                            const std::vector<double>& variances, int n_per_class,
                            std::uint64_t seed);

// x ~ N(0, I_dims), y = |x|_1.
DatasetReal l1_norm_regression(int dims, int n, std::uint64_t seed);

// x ~ N(0, I), y = max(0, <w_star, x>).
DatasetReal relu_realizable(const Vector& w_star, int n, std::uint64_t seed);

// x ~ N(0, I), y = alpha(x) + sum_p x_p * w_star_p^2 (coordinate features).
DatasetReal quad_feature_labels(const Vector& w_star, AlphaSpec alpha, int n,
                                std::uint64_t seed);

// h_{k,i} = ReLU(W_r x_{k,i}) for an explicit weight matrix (test hook).
FeatureBank relu_feature_bank(const Matrix& w_r, const DatasetClass& data);

// Same, with W_r entries iid N(0, 1/input_dim).
FeatureBank random_relu_features(int input_dim, int feature_dim, const DatasetClass& data,
                                 std::uint64_t seed);

struct Moments {
  Vector a;  // a_q = mean[(y - alpha(x)) beta_{q,q}(x)]
  Matrix b;  // b_{q,p} = mean[beta_{q,q}(x) beta_{p,p}(x)], full so the
             // diagonality assumption can be audited
};

Moments estimate_moments(const DatasetReal& data, BetaSpec beta, AlphaSpec alpha);

}  // namespace elast
