#pragma once

// Stochastic/deterministic training loops for the three solvable models,
// with in-loop S_rel tracking at fixed probe pairs and multi-seed
// aggregation. Each run is single-threaded and deterministic in its seed.

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "elast/elasticity.hpp"
#include "elast/flows.hpp"
#include "elast/series.hpp"

namespace elast {

struct SgdConfig {
  double eta = 1e-3;
  long steps = 1000;
  std::vector<std::uint64_t> seeds;
  std::vector<std::pair<Vector, Vector>> track_pairs;  // (x sampled, x' observed)
  long record_every = 1;

  // When positive, S_rel and losses are additionally recorded at every
  // step <= this, so early dynamics can be compared pointwise against the
  // closed forms without recording the whole long run densely.
  long dense_record_until = 0;

  int eval_samples = 1000;  // held-out sample size for the empirical loss

  void validate() const;
};

struct RecordedStep {
  long step = 0;
  std::vector<std::optional<double>> srel;  // one slot per tracked pair
  double emp_loss = 0.0;
  std::optional<double> pop_loss;
  double dist_to_target = 0.0;  // |w_t - w_*| where a target exists
};

struct RunRecord {
  std::uint64_t seed = 0;
  std::vector<RecordedStep> recorded;
  bool aborted = false;    // divergence (|w| > 1e6)
  bool unstable = false;   // gd_last_layer: loss rose 10 consecutive records
  long converged_step = -1;  // first step with |w_t - w_*| < 1e-6, -1 if never
  Vector final_w;
};

// SGD on the quadratic-feature risk: fresh x_t ~ N(0, I) each step and
//   w_{t+1} = w_t + 2 eta (sum_p x_{t,p} (w*_p^2 - w_{t,p}^2)) x_t . w_t.
// S_rel is measured with the same squared-loss fictitious update and the
// training eta. Initial weights are the positive roots of spec.w0_sq.
std::vector<RunRecord> sgd_quad(const DiagQuadFlowSpec& spec, const Vector& w_star,
                                const SgdConfig& config);

// Modified SGD for the realizable ReLU gate: fresh x_t ~ N(0, I), labels
// y_t = max(0, <w_*, x_t>), gradient proxy g_t = -1{y_t > 0}(y_t - w^T x)x.
std::vector<RunRecord> sgd_relu(const ReluFlowSpec& spec, const SgdConfig& config);

// Full-batch gradient descent with step theta^2 on the ridge-penalized
// last-layer objective (the one whose gradient is M w_q - u_q). Records
// the closed-form S_rel for the probe pair (h_ki sampled from row
// `sampled_class`, h_cj observed) and the empirical loss.
struct LastLayerProbe {
  Vector h_ki;
  int sampled_class = 0;
  Vector h_cj;
};

RunRecord gd_last_layer(const LinearFlowSpec& spec, const LastLayerProbe& probe,
                        const SgdConfig& config);

// Empirical last-layer objective written through M and u:
// 1/2 - sum_k <w_k, u_k> + 1/2 sum_q w_q^T M w_q.
double last_layer_loss(const LinearFlowSpec& spec, const Matrix& w);

// Per-step mean/std over runs with defined values; runs are reduced in
// ascending seed order so the result is independent of input order.
SRelSeries aggregate_runs(const std::vector<RunRecord>& runs,
                          const std::vector<std::string>& pair_ids);

}  // namespace elast
