#include "elast/flows.hpp"

#include <cmath>
#include <sstream>

namespace elast {

LinearFlowSpec LinearFlowSpec::build(const FeatureBank& bank, double lambda1, double theta,
                                     const Matrix& w0, double beta_sq) {
  if (!(lambda1 > 0.0)) throw ParameterError("LinearFlowSpec: lambda1 must be positive");
  const int k_classes = bank.num_classes();
  const int p = bank.feature_dim();
  const int n_total = bank.total();
  if (k_classes == 0 || n_total == 0) throw ParameterError("LinearFlowSpec: empty feature bank");
  if (w0.rows() != k_classes || w0.cols() != p) {
    throw ShapeError("LinearFlowSpec: w0 must be K x p");
  }
  require_finite(w0, "LinearFlowSpec w0");

  LinearFlowSpec spec;
  spec.lambda1 = lambda1;
  spec.theta = theta;
  spec.beta_sq = beta_sq;
  spec.n_total = n_total;
  spec.w0 = w0;
  spec.m = (double(n_total) * lambda1 / double(k_classes)) * Matrix::Identity(p, p);
  spec.u = Matrix::Zero(k_classes, p);
  for (int k = 0; k < k_classes; ++k) {
    for (const Vector& h : bank.features[k]) {
      spec.m += (h * h.transpose()) / double(n_total);
      spec.u.row(k) += h.transpose() / double(n_total);
    }
  }
  if (!is_pd(spec.m)) {
    throw SingularityError("LinearFlowSpec: M is not positive definite");
  }
  return spec;
}

Matrix linear_flow_state(const LinearFlowSpec& spec, double t) {
  const Matrix decay = sym_expm_neg(spec.m, spec.theta * spec.theta * t);
  Matrix state(spec.w0.rows(), spec.w0.cols());
  for (Eigen::Index q = 0; q < spec.w0.rows(); ++q) {
    const Vector fixed_point = spec.beta_sq * solve_spd(spec.m, spec.u.row(q));
    state.row(q) = (decay * (spec.w0.row(q).transpose() - fixed_point) + fixed_point).transpose();
  }
  return state;
}

ReluFlowSpec ReluFlowSpec::build(const DatasetReal& data, double beta, const Vector& w_star,
                                 const Vector& w0) {
  if (data.size() == 0) throw ParameterError("ReluFlowSpec: dataset is empty");
  const int n = data.dim();
  if (w_star.size() != n || w0.size() != n) {
    throw ShapeError("ReluFlowSpec: w_star/w0 dimension does not match data");
  }
  ReluFlowSpec spec;
  spec.beta = beta;
  spec.w_star = w_star;
  spec.w0 = w0;
  spec.m = Matrix::Zero(n, n);
  spec.z = Vector::Zero(n);
  for (int i = 0; i < data.size(); ++i) {
    const Vector& x = data.x[i];
    if (w_star.dot(x) > 0.0) {
      spec.m += (x * x.transpose()) / double(data.size());
      spec.z += (std::max(0.0, w_star.dot(x)) / double(data.size())) * x;
    }
  }
  if (!is_pd(spec.m)) {
    throw SingularityError("ReluFlowSpec: M = avg[1{w_*^T x > 0} x x^T] is not positive definite");
  }
  return spec;
}

Vector relu_flow_state(const ReluFlowSpec& spec, double t) {
  const Vector limit = solve_spd(spec.m, spec.z);  // M^{-1} z
  const Matrix decay = sym_expm_neg(spec.m, spec.beta * t);
  return decay * (spec.w0 - limit) + limit;
}

DiagQuadFlowSpec::DiagQuadFlowSpec(Vector a_in, Vector b_in, double theta_in, Vector w0_sq_in)
    : a(std::move(a_in)), b(std::move(b_in)), w0_sq(std::move(w0_sq_in)), theta(theta_in) {
  const Eigen::Index n = a.size();
  if (b.size() != n || w0_sq.size() != n) {
    throw ShapeError("DiagQuadFlowSpec: a, b, w0_sq must share one dimension");
  }
  if (!(theta > 0.0)) throw ParameterError("DiagQuadFlowSpec: theta must be positive");
  for (Eigen::Index q = 0; q < n; ++q) {
    if (!(a(q) > 0.0)) {
      throw ParameterError("DiagQuadFlowSpec: a_q must be positive");
    }
    if (!(b(q) > 0.0)) {
      // b_q = 0 leaves the closed form undefined; rejected outright.
      throw ParameterError("DiagQuadFlowSpec: b_q must be positive");
    }
    if (!(w0_sq(q) > 0.0) || !(w0_sq(q) < a(q) / b(q))) {
      std::ostringstream msg;
      msg << "DiagQuadFlowSpec: w0_sq(" << q << ") = " << w0_sq(q) << " outside (0, "
          << a(q) / b(q) << ")";
      throw ParameterError(msg.str());
    }
  }
}

Vector diag_quad_flow_state(const DiagQuadFlowSpec& spec, double t) {
  Vector state(spec.a.size());
  for (Eigen::Index q = 0; q < spec.a.size(); ++q) {
    const double decay = std::exp(-4.0 * spec.theta * spec.a(q) * t);
    const double denom = spec.b(q) + (-spec.b(q) + spec.a(q) / spec.w0_sq(q)) * decay;
    state(q) = spec.a(q) / denom;
  }
  return state;
}

Vector rk4_integrate(const VectorField& rhs, const Vector& w0, double t_end, int steps) {
  if (steps < 1) throw ParameterError("rk4_integrate: steps must be >= 1");
  const double h = t_end / double(steps);
  Vector w = w0;
  double t = 0.0;
  for (int i = 0; i < steps; ++i) {
    const Vector k1 = rhs(t, w);
    const Vector k2 = rhs(t + 0.5 * h, w + 0.5 * h * k1);
    const Vector k3 = rhs(t + 0.5 * h, w + 0.5 * h * k2);
    const Vector k4 = rhs(t + h, w + h * k3);
    w += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += h;
  }
  return w;
}

namespace {

OdeResidualReport central_difference_residual(const std::function<Vector(double)>& state,
                                              const std::function<Vector(const Vector&)>& rhs,
                                              double t, double h) {
  if (!(h > 0.0)) throw ParameterError("ode_residual: step h must be positive");
  if (t < 0.0) throw ParameterError("ode_residual: need t >= 0");
  Vector derivative;
  if (t >= h) {
    derivative = (state(t + h) - state(t - h)) / (2.0 * h);
  } else {
    // Second-order one-sided difference so t = 0 stays evaluable.
    derivative = (-3.0 * state(t) + 4.0 * state(t + h) - state(t + 2.0 * h)) / (2.0 * h);
  }
  const Vector field = rhs(state(t));
  OdeResidualReport report;
  report.residual_norm = (derivative - field).norm();
  report.rhs_norm = field.norm();
  return report;
}

Vector flatten(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

}  // namespace

OdeResidualReport ode_residual(const LinearFlowSpec& spec, double t, double h) {
  const double rate = spec.theta * spec.theta;
  auto state = [&](double s) { return flatten(linear_flow_state(spec, s)); };
  auto rhs = [&](const Vector& flat) {
    Eigen::Map<const Matrix> w(flat.data(), spec.w0.rows(), spec.w0.cols());
    Matrix dw(w.rows(), w.cols());
    for (Eigen::Index q = 0; q < w.rows(); ++q) {
      dw.row(q) = rate * spec.beta_sq * spec.u.row(q) - rate * (spec.m * w.row(q).transpose()).transpose();
    }
    return flatten(dw);
  };
  return central_difference_residual(state, rhs, t, h);
}

OdeResidualReport ode_residual(const ReluFlowSpec& spec, double t, double h) {
  auto state = [&](double s) { return relu_flow_state(spec, s); };
  auto rhs = [&](const Vector& w) { return Vector(spec.beta * (spec.z - spec.m * w)); };
  return central_difference_residual(state, rhs, t, h);
}

OdeResidualReport ode_residual(const DiagQuadFlowSpec& spec, double t, double h) {
  // In terms of s_q = w_q^2 the flow reads ds_q/dt = 4 theta s_q (a_q - b_q s_q).
  auto state = [&](double s) { return diag_quad_flow_state(spec, s); };
  auto rhs = [&](const Vector& s) {
    return Vector(4.0 * spec.theta * s.array() * (spec.a.array() - spec.b.array() * s.array()));
  };
  return central_difference_residual(state, rhs, t, h);
}

}  // namespace elast
