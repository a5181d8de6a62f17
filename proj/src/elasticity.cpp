#include "elast/elasticity.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace elast {

namespace {

SRelSample make_sample(const Vector& x, const Vector& x_prime, double y, double eta) {
  SRelSample sample;
  sample.x = x;
  sample.x_prime = x_prime;
  sample.y = y;
  sample.eta = eta;
  return sample;
}

void check_probability_vector(const Vector& p, const char* who) {
  if (p.size() == 0) throw ContractError(std::string(who) + ": empty prediction");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!(p(i) >= 0.0)) {
      throw ContractError(std::string(who) + ": prediction has a negative entry");
    }
    sum += p(i);
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    std::ostringstream msg;
    msg << who << ": prediction entries sum to " << sum << ", not 1";
    throw ContractError(msg.str());
  }
}

}  // namespace

SRelSample srel_generic(const PredictFn& predict, const GradLossFn& grad_loss,
                        const Vector& weights, const Vector& x, const Vector& x_prime,
                        double y, double eta) {
  VectorPredictFn vec_predict = [&predict](const Vector& w, const Vector& point) {
    Vector out(1);
    out(0) = predict(w, point);
    return out;
  };
  return srel_generic(vec_predict, grad_loss, weights, x, x_prime, y, eta);
}

SRelSample srel_generic(const VectorPredictFn& predict, const GradLossFn& grad_loss,
                        const Vector& weights, const Vector& x, const Vector& x_prime,
                        double y, double eta) {
  if (!(eta > 0.0)) throw ParameterError("srel_generic: eta must be positive");
  SRelSample sample = make_sample(x, x_prime, y, eta);

  const Vector updated = weights - eta * grad_loss(weights, x, y);
  const Vector f_x_before = predict(weights, x);
  const double denom_change = (predict(updated, x) - f_x_before).norm();
  if (denom_change < kDenomFloor * (1.0 + f_x_before.norm())) {
    return sample;  // undefined: the update did not move the prediction at x
  }
  const double numer_change = (predict(updated, x_prime) - predict(weights, x_prime)).norm();
  sample.value = numer_change / denom_change;
  return sample;
}

std::optional<double> kl_divergence(const Vector& p, const Vector& q) {
  if (p.size() != q.size()) throw ShapeError("kl_divergence: dimension mismatch");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) <= 0.0) continue;  // 0 log(0/q) = 0
    if (q(i) <= 0.0) return std::nullopt;
    sum += p(i) * std::log(p(i) / q(i));
  }
  return sum;
}

SRelSample srel_kl(const VectorPredictFn& softmax_predict, const ClassGradLossFn& grad_loss,
                   const Vector& weights, const Vector& x, const Vector& x_prime, int y,
                   double eta) {
  if (!(eta > 0.0)) throw ParameterError("srel_kl: eta must be positive");
  SRelSample sample = make_sample(x, x_prime, double(y), eta);

  const Vector updated = weights - eta * grad_loss(weights, x, y);
  const Vector q_at_x = softmax_predict(weights, x);
  const Vector p_at_x = softmax_predict(updated, x);
  check_probability_vector(q_at_x, "srel_kl");
  check_probability_vector(p_at_x, "srel_kl");

  const std::optional<double> denom = kl_divergence(p_at_x, q_at_x);
  if (!denom.has_value() || *denom < kDenomFloor) return sample;

  const Vector q_at_xp = softmax_predict(weights, x_prime);
  const Vector p_at_xp = softmax_predict(updated, x_prime);
  check_probability_vector(q_at_xp, "srel_kl");
  check_probability_vector(p_at_xp, "srel_kl");
  const std::optional<double> numer = kl_divergence(p_at_xp, q_at_xp);
  if (!numer.has_value()) return sample;

  sample.value = *numer / *denom;
  return sample;
}

SmoothedSRel mean_defined(const std::vector<std::optional<double>>& values) {
  SmoothedSRel out;
  out.total_pairs = static_cast<int>(values.size());
  double sum = 0.0;
  for (const auto& v : values) {
    if (v.has_value()) {
      sum += *v;
      out.defined_pairs++;
    }
  }
  if (out.defined_pairs > 0) out.value = sum / double(out.defined_pairs);
  return out;
}

SmoothedSRel srel_k_smooth(const VectorPredictFn& softmax_predict,
                           const ClassGradLossFn& grad_loss, const Vector& weights,
                           const std::vector<Vector>& class1_points,
                           const std::vector<Vector>& class2_points, int class2_label,
                           double eta) {
  if (class1_points.empty() || class2_points.empty()) {
    throw ParameterError("srel_k_smooth: need at least one point per class");
  }
  std::vector<std::optional<double>> grid;
  grid.reserve(class1_points.size() * class2_points.size());
  for (const Vector& x : class2_points) {  // sampled point, provides the update
    for (const Vector& x_prime : class1_points) {
      grid.push_back(
          srel_kl(softmax_predict, grad_loss, weights, x, x_prime, class2_label, eta).value);
    }
  }
  return mean_defined(grid);
}

Matrix last_layer_fictitious_update(const Matrix& w, const Vector& h_ki, int sampled_class,
                                    double lambda1, int n_total, double eta) {
  if (w.cols() != h_ki.size()) {
    throw ShapeError("last_layer_fictitious_update: feature dimension mismatch");
  }
  const double ridge = double(n_total) * lambda1 / double(w.rows());
  Matrix updated = w;
  for (Eigen::Index q = 0; q < w.rows(); ++q) {
    // T_{k,i} w_q = ridge w_q + h <h, w_q>
    Vector grad = ridge * w.row(q).transpose() + h_ki * h_ki.dot(w.row(q));
    if (q == sampled_class) grad -= h_ki;
    updated.row(q) -= eta * grad.transpose();
  }
  return updated;
}

std::optional<double> srel_last_layer_closed_form(const Matrix& w, const Vector& h_ki,
                                                  int sampled_class, const Vector& h_cj,
                                                  double lambda1, int n_total) {
  if (w.cols() != h_ki.size() || w.cols() != h_cj.size()) {
    throw ShapeError("srel_last_layer_closed_form: feature dimension mismatch");
  }
  if (sampled_class < 0 || sampled_class >= w.rows()) {
    throw ParameterError("srel_last_layer_closed_form: sampled_class out of range");
  }
  const double ridge = double(n_total) * lambda1 / double(w.rows());
  const double overlap = h_ki.dot(h_cj);
  const double h_norm_sq = h_ki.squaredNorm();
  const double h_tilde = ridge + h_norm_sq;

  // T_{k,i} h_cj = ridge h_cj + h_ki <h_ki, h_cj>
  const Vector t_h = ridge * h_cj + overlap * h_ki;

  double numer = overlap * overlap;
  double denom = h_norm_sq * h_norm_sq;
  for (Eigen::Index q = 0; q < w.rows(); ++q) {
    const double th_w = t_h.dot(w.row(q));
    const double h_w = h_ki.dot(w.row(q));
    numer += th_w * th_w;
    denom += h_tilde * h_tilde * h_w * h_w;
    if (q == sampled_class) {
      numer -= 2.0 * overlap * th_w;
      denom -= 2.0 * h_tilde * h_norm_sq * h_w;
    }
  }
  numer = std::max(numer, 0.0);  // exact expression is a squared norm
  denom = std::max(denom, 0.0);

  const double scale = 1.0 + h_norm_sq;
  if (std::sqrt(denom) < kDenomFloor * scale) return std::nullopt;
  return std::sqrt(numer / denom);
}

double relu_change_upper_bound(const ReluFlowSpec& spec, double t, double eta, const Vector& x,
                               const Vector& x_prime) {
  if (spec.w_star.dot(x) <= 0.0) return 0.0;
  const Matrix decay = sym_expm_neg(spec.m, spec.beta * t);
  const double drift = std::abs((decay * (spec.w0 - spec.w_star)).dot(x));
  return eta * spec.beta * std::abs(x.dot(x_prime)) * drift;
}

double relu_srel_lower_bound(const Vector& x, const Vector& x_prime) {
  const double x_norm_sq = x.squaredNorm();
  if (x_norm_sq == 0.0) throw ParameterError("relu_srel_lower_bound: x must be nonzero");
  return std::abs(x.dot(x_prime)) / x_norm_sq;
}

double DHomModel::predict(const Vector& x) const {
  double out = alpha ? alpha(x) : 0.0;
  for (int r = 0; r < width; ++r) {
    const Vector powered = weights.row(r).transpose().array().pow(double(degree));
    out += beta[r](x).dot(powered);
  }
  return out;
}

Vector DHomModel::grad_loss_row(const Vector& x, double y, int r) const {
  const double residual = y - predict(x);
  const Vector powered = weights.row(r).transpose().array().pow(double(degree - 1));
  return -residual * double(degree) * beta[r](x).cwiseProduct(powered);
}

Matrix DHomModel::fictitious_update(const Vector& x, double y, double eta) const {
  Matrix updated = weights;
  for (int r = 0; r < width; ++r) {
    updated.row(r) -= eta * grad_loss_row(x, y, r).transpose();
  }
  return updated;
}

DHomModel DHomModel::coordinate_diag(int n, int degree, const Vector& diag_weights) {
  if (diag_weights.size() != n) {
    throw ShapeError("DHomModel::coordinate_diag: weight dimension mismatch");
  }
  DHomModel model;
  model.width = n;
  model.input_dim = n;
  model.degree = degree;
  model.weights = Matrix(diag_weights.asDiagonal());
  model.alpha = [](const Vector&) { return 0.0; };
  model.beta.reserve(n);
  for (int r = 0; r < n; ++r) {
    model.beta.push_back([r, n](const Vector& x) {
      Vector e = Vector::Zero(n);
      e(r) = x(r);
      return e;
    });
  }
  return model;
}

namespace {

// Shared accumulation for the limit expression and its upper bound.
struct DHomSums {
  double numer_sum = 0.0;        // sum_r <beta_r(x') . beta_r(x), w^{2(d-1)}>
  double denom_sum = 0.0;        // sum_r <beta_r(x)^2, w^{2(d-1)}>
  double max_cross_norm = 0.0;   // max_r |beta_r(x') . beta_r(x)|
  double weight_norm_sum = 0.0;  // sum_r |w_r^{2(d-1)}|
};

DHomSums dhom_sums(const DHomModel& model, const Vector& x, const Vector& x_prime) {
  DHomSums sums;
  const double exponent = 2.0 * double(model.degree - 1);
  for (int r = 0; r < model.width; ++r) {
    const Vector powered = model.weights.row(r).transpose().array().pow(exponent);
    const Vector beta_x = model.beta[r](x);
    const Vector beta_xp = model.beta[r](x_prime);
    const Vector cross = beta_xp.cwiseProduct(beta_x);
    sums.numer_sum += cross.dot(powered);
    sums.denom_sum += beta_x.cwiseProduct(beta_x).dot(powered);
    sums.max_cross_norm = std::max(sums.max_cross_norm, cross.norm());
    sums.weight_norm_sum += powered.norm();
  }
  return sums;
}

}  // namespace

std::optional<double> srel_dhom_limit_general(const DHomModel& model, const Vector& x,
                                              const Vector& x_prime) {
  const DHomSums sums = dhom_sums(model, x, x_prime);
  const double numer = std::abs(sums.numer_sum);
  const double denom = std::abs(sums.denom_sum);
  if (denom < kDenomFloor * (1.0 + numer)) return std::nullopt;
  return numer / denom;
}

std::optional<double> srel_dhom_upper_bound(const DHomModel& model, const Vector& x,
                                            const Vector& x_prime) {
  const DHomSums sums = dhom_sums(model, x, x_prime);
  const double numer = sums.max_cross_norm * sums.weight_norm_sum;
  const double denom = std::abs(sums.denom_sum);
  if (denom < kDenomFloor * (1.0 + numer)) return std::nullopt;
  return numer / denom;
}

std::optional<double> srel_diag_quad_time(const DiagQuadFlowSpec& spec, const Vector& beta_x,
                                          const Vector& beta_x_prime, double t) {
  const Eigen::Index n = spec.a.size();
  if (beta_x.size() != n || beta_x_prime.size() != n) {
    throw ShapeError("srel_diag_quad_time: feature vectors must match the flow dimension");
  }
  double numer_sum = 0.0;
  double denom_sum = 0.0;
  for (Eigen::Index r = 0; r < n; ++r) {
    const double decay = std::exp(-4.0 * spec.theta * spec.a(r) * t);
    const double d_r = spec.b(r) + (-spec.b(r) + spec.a(r) / spec.w0_sq(r)) * decay;
    const double coeff = spec.a(r) / d_r;
    numer_sum += coeff * beta_x_prime(r) * beta_x(r);
    denom_sum += coeff * beta_x(r) * beta_x(r);
  }
  const double numer = std::abs(numer_sum);
  const double denom = std::abs(denom_sum);
  if (denom < kDenomFloor * (1.0 + numer)) return std::nullopt;
  return numer / denom;
}

namespace {

double bisect_increasing(const std::function<double(double)>& g, double lo, double hi) {
  // Root of g on [lo, hi] with g(lo) <= 0 <= g(hi).
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) <= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

}  // namespace

LemmaBoundResult lemma_bound_eval(double alpha_sq, double b1, double c1, double b2, double c2,
                                  double p_sq, double q_sq, double t) {
  if (!(alpha_sq > 0.0)) throw ParameterError("lemma_bound_eval: alpha_sq must be positive");
  if (b1 < 0.0 || b2 < 0.0) throw ParameterError("lemma_bound_eval: b1 and b2 must be >= 0");
  if (!(p_sq > 0.0) || !(q_sq > 0.0)) {
    throw ParameterError("lemma_bound_eval: decay rates p_sq, q_sq must be positive");
  }
  if (t < 0.0) throw ParameterError("lemma_bound_eval: t must be >= 0");
  const double beta_sq = b1 + c1;
  const double scale = std::abs(b1) + std::abs(c1) + std::abs(b2) + std::abs(c2) + 1.0;
  if (std::abs((b1 + c1) - (b2 + c2)) > 1e-12 * scale) {
    throw ParameterError("lemma_bound_eval: requires b1 + c1 = b2 + c2");
  }
  if (beta_sq < -1e-12 * scale) {
    throw ParameterError("lemma_bound_eval: b1 + c1 must equal a square beta^2 >= 0");
  }

  auto numer_fn = [&](double s) { return alpha_sq + b1 * std::exp(-p_sq * s) + c1 * std::exp(-q_sq * s); };
  auto denom_fn = [&](double s) { return alpha_sq + b2 * std::exp(-p_sq * s) + c2 * std::exp(-q_sq * s); };

  LemmaBoundResult result;

  // t2*: past it, alpha^2 - b1 e^{-q^2 s} stays above alpha^2 / 2.
  const double margin = 0.5 * alpha_sq;
  if (b1 <= margin) {
    result.t2_star = 0.0;
  } else {
    auto gap = [&](double s) { return (alpha_sq - b1 * std::exp(-q_sq * s)) - margin; };
    double hi = 1.0;
    while (gap(hi) <= 0.0) hi *= 2.0;
    result.t2_star = bisect_increasing(gap, 0.0, hi);
  }

  // t1*: last time the f denominator dips to alpha^2 / 2 or below.
  const double decay_floor = std::min(p_sq, q_sq);
  const double mass = b2 + std::abs(c2);
  double horizon = 1.0;
  if (mass > margin) horizon = std::max(1.0, std::log(mass / margin) / decay_floor + 1.0);
  const int grid_points = 4096;
  int last_low = -1;
  for (int i = 0; i <= grid_points; ++i) {
    const double s = horizon * double(i) / double(grid_points);
    if (denom_fn(s) <= margin) last_low = i;
  }
  if (last_low < 0) {
    result.t1_star = 0.0;
  } else {
    const double lo = horizon * double(last_low) / double(grid_points);
    const double hi = horizon * double(last_low + 1) / double(grid_points);
    auto gap = [&](double s) { return denom_fn(s) - margin; };
    result.t1_star = bisect_increasing(gap, lo, hi);
  }

  result.f_value = std::abs(numer_fn(t)) / std::abs(denom_fn(t));
  result.lower_bound = (alpha_sq - b1 * std::exp(-q_sq * result.t2_star)) /
                       (alpha_sq + b2 * std::exp(-p_sq * t) + beta_sq * std::exp(-q_sq * t));
  return result;
}

}  // namespace elast
