#pragma once

// Closed-form weight trajectories for the three exactly solvable gradient
// flows, plus a fixed-step RK4 integrator that serves as an independent
// numerical oracle for all of them.

#include <functional>

#include "elast/data_gen.hpp"
#include "elast/linalg.hpp"

namespace elast {

// Ridge-penalized linear regression over fixed per-class features
// ("last layer" training). The flow on row q of W is
//   dw_q/dt = theta^2 beta^2 u_q - theta^2 M w_q
// with M = (N lambda1 / K) I + (1/N) sum_{k,i} h h^T and
// u_q = (1/N) sum_i h_{q,i}.
struct LinearFlowSpec {
  Matrix m;        // p x p, positive definite for lambda1 > 0
  Matrix u;        // K x p, row q = u_q
  Matrix w0;       // K x p initial weights
  double lambda1 = 0.0;
  double theta = 0.0;
  double beta_sq = 1.0;
  int n_total = 0;  // N

  static LinearFlowSpec build(const FeatureBank& bank, double lambda1, double theta,
                              const Matrix& w0, double beta_sq = 1.0);
};

// w_q(t) = e^{-theta^2 M t}(w_q(0) - beta^2 M^{-1} u_q) + beta^2 M^{-1} u_q,
// the solution consistent with the flow's fixed point M w_q = beta^2 u_q.
Matrix linear_flow_state(const LinearFlowSpec& spec, double t);

// Realizable ReLU-gate flow dw/dt = beta (z - M w), with the moment
// matrices taken as sample averages over the provided dataset:
//   M = avg[ 1{w_*^T x > 0} x x^T ],  z = avg[ 1{w_*^T x > 0} max(0, w_*^T x) x ].
struct ReluFlowSpec {
  Matrix m;
  Vector z;
  Vector w_star;
  Vector w0;
  double beta = 0.0;

  static ReluFlowSpec build(const DatasetReal& data, double beta, const Vector& w_star,
                            const Vector& w0);
};

// w(t) = e^{-beta M t} w(0) + M^{-1} (I - e^{-beta M t}) z.
Vector relu_flow_state(const ReluFlowSpec& spec, double t);

// Degree-2 weight-homogeneous predictor with diagonal orthogonal features.
// The state tracked in closed form is s_q(t) = w_q(t)^2.
struct DiagQuadFlowSpec {
  Vector a;      // a_q > 0
  Vector b;      // b_q > 0
  Vector w0_sq;  // initial w_q(0)^2, in (0, a_q/b_q)
  double theta = 0.0;

  DiagQuadFlowSpec(Vector a_in, Vector b_in, double theta_in, Vector w0_sq_in);
};

// s_q(t) = a_q / (b_q + (-b_q + a_q / s_q(0)) e^{-4 theta a_q t}).
Vector diag_quad_flow_state(const DiagQuadFlowSpec& spec, double t);

using VectorField = std::function<Vector(double t, const Vector& w)>;

// Classical 4th-order Runge-Kutta with fixed step t_end/steps.
Vector rk4_integrate(const VectorField& rhs, const Vector& w0, double t_end, int steps);

struct OdeResidualReport {
  double residual_norm = 0.0;  // |d/dt state(t) (central diff) - rhs(state(t))|
  double rhs_norm = 0.0;
};

// Consistency check: central-difference derivative of the closed-form
// trajectory against the analytic right-hand side at time t.
OdeResidualReport ode_residual(const LinearFlowSpec& spec, double t, double h);
OdeResidualReport ode_residual(const ReluFlowSpec& spec, double t, double h);
OdeResidualReport ode_residual(const DiagQuadFlowSpec& spec, double t, double h);

}  // namespace elast
