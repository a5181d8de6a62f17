#pragma once

// Local elasticity S_rel: the ratio of the prediction change at a test
// point x' to the change at the sampled point x under one fictitious
// gradient step w+ = w - eta * grad loss(w, (x, y)). Three flavors live
// here: the generic prediction-change ratio, the KL-divergence ratio for
// probability-simplex predictors, and the class-pair smoothed average.
// Alongside them, every closed-form expression and bound for S_rel along
// the solvable flows.
//
// A ratio whose denominator change vanishes is reported as an undefined
// marker (empty optional), never as an error or infinity; aggregation
// skips undefined samples and records how many remained.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "elast/flows.hpp"
#include "elast/linalg.hpp"

namespace elast {

// One fictitious-update measurement at a pair (x, x').
struct SRelSample {
  Vector x;
  Vector x_prime;
  double y = 0.0;   // label of the sampled point x (class index for KL flavor)
  double eta = 0.0;
  std::optional<double> value;  // empty = denominator change vanished
};

// Relative threshold under which a denominator change counts as zero.
inline constexpr double kDenomFloor = 1e-14;

using PredictFn = std::function<double(const Vector& w, const Vector& x)>;
using VectorPredictFn = std::function<Vector(const Vector& w, const Vector& x)>;
using GradLossFn = std::function<Vector(const Vector& w, const Vector& x, double y)>;
using ClassGradLossFn = std::function<Vector(const Vector& w, const Vector& x, int y)>;

// |f(x', w+) - f(x', w)| / |f(x, w+) - f(x, w)| for a scalar predictor.
SRelSample srel_generic(const PredictFn& predict, const GradLossFn& grad_loss,
                        const Vector& weights, const Vector& x, const Vector& x_prime,
                        double y, double eta);

// Same ratio with Euclidean norms of the prediction change, for
// vector-valued predictors (the last-layer model is one).
SRelSample srel_generic(const VectorPredictFn& predict, const GradLossFn& grad_loss,
                        const Vector& weights, const Vector& x, const Vector& x_prime,
                        double y, double eta);

// KL(p, q) = sum_i p_i log(p_i / q_i) with the convention 0 log(0/q) = 0.
// Returns empty when some p_i > 0 meets q_i = 0 (infinite divergence).
std::optional<double> kl_divergence(const Vector& p, const Vector& q);

// KL(g(x', w+), g(x', w)) / KL(g(x, w+), g(x, w)) for a probability-simplex
// predictor trained with cross-entropy. Throws ContractError if
// softmax_predict does not output a probability vector.
SRelSample srel_kl(const VectorPredictFn& softmax_predict, const ClassGradLossFn& grad_loss,
                   const Vector& weights, const Vector& x, const Vector& x_prime, int y,
                   double eta);

struct SmoothedSRel {
  std::optional<double> value;  // empty when every pair was undefined
  int defined_pairs = 0;
  int total_pairs = 0;
};

// Mean of srel_kl over the k x k grid of (x' from class1, x sampled from
// class2); undefined pairs are skipped and the divisor reduced. class2_label
// is the true class index of the sampled points.
SmoothedSRel srel_k_smooth(const VectorPredictFn& softmax_predict,
                           const ClassGradLossFn& grad_loss, const Vector& weights,
                           const std::vector<Vector>& class1_points,
                           const std::vector<Vector>& class2_points, int class2_label,
                           double eta);

// Mean over the defined entries; building block for the smoothed average.
SmoothedSRel mean_defined(const std::vector<std::optional<double>>& values);

// Closed-form S_rel for the ridge-penalized last-layer model: the square
// root of the exact step-length-free ratio, with
//   T_{k,i} = (N lambda1 / K) I + h_ki h_ki^T,
//   h~_{k,i} = N lambda1 / K + |h_ki|^2.
// `sampled_class` is the class row k of the sampled feature vector h_ki.
std::optional<double> srel_last_layer_closed_form(const Matrix& w, const Vector& h_ki,
                                                  int sampled_class, const Vector& h_cj,
                                                  double lambda1, int n_total);

// Fictitious update of the last-layer weights under the per-sample loss;
// exposed so simulators and tests share one definition.
Matrix last_layer_fictitious_update(const Matrix& w, const Vector& h_ki, int sampled_class,
                                    double lambda1, int n_total, double eta);

// Time-dependent upper bound on the prediction change at x' along the
// ReLU flow: eta beta 1{<w_*,x> > 0} |<x,x'>| |<e^{-beta M t}(w0 - w_*), x>|.
double relu_change_upper_bound(const ReluFlowSpec& spec, double t, double eta, const Vector& x,
                               const Vector& x_prime);

// Late-time lower bound |<x,x'>| / |x|^2 (intended for <w_*,x> > 0 and
// <w_*,x'> > 0, which the caller checks).
double relu_srel_lower_bound(const Vector& x, const Vector& x_prime);

using AlphaFn = std::function<double(const Vector& x)>;
using BetaFn = std::function<Vector(const Vector& x)>;

// Degree-d weight-homogeneous feature-linear predictor
// f(W, x) = alpha(x) + sum_r <beta_r(x), w_r^d>, w_r^d taken coordinatewise.
struct DHomModel {
  int width = 0;      // number of feature maps / weight rows
  int input_dim = 0;  // dimension of w_r and beta_r(x)
  int degree = 1;
  Matrix weights;  // width x input_dim
  AlphaFn alpha;
  std::vector<BetaFn> beta;  // one map per row

  double predict(const Vector& x) const;
  Vector grad_loss_row(const Vector& x, double y, int r) const;  // d/dw_r of squared loss
  Matrix fictitious_update(const Vector& x, double y, double eta) const;

  // Diagonal coordinate-feature instance: width = input_dim = n,
  // beta_r(x) = x_r e_r, alpha = 0.
  static DHomModel coordinate_diag(int n, int degree, const Vector& diag_weights);
};

// eta -> 0 limit of S_rel at the model's current weights:
//   |sum_r <beta_r(x') . beta_r(x), w_r^{2(d-1)}>| /
//   |sum_r <beta_r(x)^2,             w_r^{2(d-1)}>|.
std::optional<double> srel_dhom_limit_general(const DHomModel& model, const Vector& x,
                                              const Vector& x_prime);

// (max_r |beta_r(x') . beta_r(x)|) * sum_r |w_r^{2(d-1)}| / |denominator|;
// dominates the limit whenever both are defined.
std::optional<double> srel_dhom_upper_bound(const DHomModel& model, const Vector& x,
                                            const Vector& x_prime);

// Exact S_rel along the diagonal quadratic flow, written directly from the
// integrated coefficients a_r / D_r(t) with
// D_r(t) = b_r + (-b_r + a_r / w_r^2(0)) e^{-4 theta a_r t}. Implemented
// independently of diag_quad_flow_state so the two routes cross-check.
std::optional<double> srel_diag_quad_time(const DiagQuadFlowSpec& spec, const Vector& beta_x,
                                          const Vector& beta_x_prime, double t);

struct LemmaBoundResult {
  double f_value = 0.0;      // |a^2 + b1 e^{-p^2 t} + c1 e^{-q^2 t}| / |a^2 + b2 ... |
  double lower_bound = 0.0;  // (a^2 - b1 e^{-q^2 t2*}) / (a^2 + b2 e^{-p^2 t} + beta^2 e^{-q^2 t})
  double t1_star = 0.0;      // past this, the f denominator stays positive
  double t2_star = 0.0;      // past this, a^2 - b1 e^{-q^2 t} stays positive (with margin)
};

// Two-exponential ratio f(t) and its late-time lower bound; threshold
// times are located by bisection on the defining inequalities.
// Requires b1, b2 >= 0, b1 + c1 = b2 + c2 = beta^2 >= 0, alpha_sq > 0,
// p_sq > 0, q_sq > 0.
LemmaBoundResult lemma_bound_eval(double alpha_sq, double b1, double c1, double b2, double c2,
                                  double p_sq, double q_sq, double t);

}  // namespace elast
