#include "elast/data_gen.hpp"

#include <cmath>
#include <sstream>

namespace elast {

double alpha_eval(AlphaSpec alpha, const Vector& x) {
  switch (alpha) {
    case AlphaSpec::Zero:
      return 0.0;
    case AlphaSpec::L1Norm:
      return x.lpNorm<1>();
  }
  throw ParameterError("alpha_eval: unknown alpha spec");
}

std::vector<int> DatasetClass::class_counts() const {
  std::vector<int> counts(num_classes, 0);
  for (int label : labels) counts.at(label)++;
  return counts;
}

int FeatureBank::total() const {
  int n = 0;
  for (const auto& cls : features) n += static_cast<int>(cls.size());
  return n;
}

int FeatureBank::feature_dim() const {
  for (const auto& cls : features) {
    if (!cls.empty()) return static_cast<int>(cls.front().size());
  }
  return 0;
}

DatasetClass gaussian_blobs(int dims, const std::vector<Vector>& means,
                            const std::vector<double>& variances, int n_per_class,
                            std::uint64_t seed) {
  if (dims < 1) throw ParameterError("gaussian_blobs: dims must be >= 1");
  if (n_per_class < 1) throw ParameterError("gaussian_blobs: n_per_class must be >= 1");
  if (means.empty() || means.size() != variances.size()) {
    throw ParameterError("gaussian_blobs: need one mean and one variance per class");
  }
  for (size_t k = 0; k < means.size(); ++k) {
    if (means[k].size() != dims) {
      throw ParameterError("gaussian_blobs: mean dimension does not match dims");
    }
    if (!(variances[k] > 0.0)) {
      std::ostringstream msg;
      msg << "gaussian_blobs: variance for class " << k << " must be positive, got "
          << variances[k];
      throw ParameterError(msg.str());
    }
  }

  Rng rng(seed);
  DatasetClass data;
  data.num_classes = static_cast<int>(means.size());
  data.seed = seed;
  data.x.reserve(static_cast<size_t>(data.num_classes) * n_per_class);
  data.labels.reserve(data.x.capacity());
  for (int k = 0; k < data.num_classes; ++k) {
    const double sigma = std::sqrt(variances[k]);
    for (int i = 0; i < n_per_class; ++i) {
      data.x.push_back(means[k] + sigma * rng.normal_vector(dims));
      data.labels.push_back(k);
    }
  }
  return data;
}

DatasetClass gaussian_blobs(int dims, const std::vector<double>& mean_scalars,
                            const std::vector<double>& variances, int n_per_class,
                            std::uint64_t seed) {
  std::vector<Vector> means;
  means.reserve(mean_scalars.size());
  for (double m : mean_scalars) means.push_back(Vector::Constant(dims, m));
  return gaussian_blobs(dims, means, variances, n_per_class, seed);
}

DatasetReal l1_norm_regression(int dims, int n, std::uint64_t seed) {
  if (dims < 1) throw ParameterError("l1_norm_regression: dims must be >= 1");
  if (n < 0) throw ParameterError("l1_norm_regression: n must be >= 0");
  Rng rng(seed);
  DatasetReal data;
  data.seed = seed;
  data.x.reserve(n);
  data.y.reserve(n);
  for (int i = 0; i < n; ++i) {
    Vector x = rng.normal_vector(dims);
    data.y.push_back(x.lpNorm<1>());
    data.x.push_back(std::move(x));
  }
  return data;
}

DatasetReal relu_realizable(const Vector& w_star, int n, std::uint64_t seed) {
  require_finite(w_star, "relu_realizable w_star");
  Rng rng(seed);
  DatasetReal data;
  data.seed = seed;
  data.x.reserve(n);
  data.y.reserve(n);
  for (int i = 0; i < n; ++i) {
    Vector x = rng.normal_vector(w_star.size());
    data.y.push_back(std::max(0.0, w_star.dot(x)));
    data.x.push_back(std::move(x));
  }
  return data;
}

DatasetReal quad_feature_labels(const Vector& w_star, AlphaSpec alpha, int n,
                                std::uint64_t seed) {
  require_finite(w_star, "quad_feature_labels w_star");
  Rng rng(seed);
  const Vector w_star_sq = w_star.array().square();
  DatasetReal data;
  data.seed = seed;
  data.x.reserve(n);
  data.y.reserve(n);
  for (int i = 0; i < n; ++i) {
    Vector x = rng.normal_vector(w_star.size());
    data.y.push_back(alpha_eval(alpha, x) + x.dot(w_star_sq));
    data.x.push_back(std::move(x));
  }
  return data;
}

FeatureBank relu_feature_bank(const Matrix& w_r, const DatasetClass& data) {
  if (data.size() == 0) throw ParameterError("relu_feature_bank: dataset is empty");
  if (w_r.cols() != data.dim()) {
    throw ShapeError("relu_feature_bank: weight columns do not match input dimension");
  }
  FeatureBank bank;
  bank.features.resize(data.num_classes);
  for (int i = 0; i < data.size(); ++i) {
    Vector h = (w_r * data.x[i]).cwiseMax(0.0);
    bank.features[data.labels[i]].push_back(std::move(h));
  }
  return bank;
}

FeatureBank random_relu_features(int input_dim, int feature_dim, const DatasetClass& data,
                                 std::uint64_t seed) {
  if (input_dim < 1 || feature_dim < 1) {
    throw ParameterError("random_relu_features: dimensions must be >= 1");
  }
  Rng rng(seed);
  const Matrix w_r = rng.normal_matrix(feature_dim, input_dim) / std::sqrt(double(input_dim));
  return relu_feature_bank(w_r, data);
}

Moments estimate_moments(const DatasetReal& data, BetaSpec beta, AlphaSpec alpha) {
  if (beta != BetaSpec::Coordinate) {
    throw ParameterError("estimate_moments: unsupported beta spec");
  }
  if (data.size() == 0) throw ParameterError("estimate_moments: dataset is empty");
  const int d = data.dim();
  Vector a = Vector::Zero(d);
  Matrix b = Matrix::Zero(d, d);
  for (int i = 0; i < data.size(); ++i) {
    const Vector& x = data.x[i];
    const double centered = data.y[i] - alpha_eval(alpha, x);
    a += centered * x;
    b += x * x.transpose();
  }
  a /= double(data.size());
  b /= double(data.size());
  return Moments{std::move(a), std::move(b)};
}

}  // namespace elast
