#include "elast/sgd_sim.hpp"

#include <algorithm>
#include <cmath>

#include "elast/rng.hpp"

namespace elast {

namespace {

constexpr double kDivergenceNorm = 1e6;
constexpr double kConvergenceDist = 1e-6;

bool should_record(long step, const SgdConfig& config) {
  if (step <= config.dense_record_until) return true;
  return step % config.record_every == 0;
}

}  // namespace

void SgdConfig::validate() const {
  if (!(eta > 0.0)) throw ParameterError("SgdConfig: eta must be positive");
  if (seeds.empty()) throw ParameterError("SgdConfig: seeds must be nonempty");
  if (record_every < 1) throw ParameterError("SgdConfig: record_every must be >= 1");
  if (steps < 1) throw ParameterError("SgdConfig: steps must be >= 1");
}

std::vector<RunRecord> sgd_quad(const DiagQuadFlowSpec& spec, const Vector& w_star,
                                const SgdConfig& config) {
  config.validate();
  const Eigen::Index dim = spec.a.size();
  if (w_star.size() != dim) throw ShapeError("sgd_quad: w_star dimension mismatch");

  const Vector w0 = spec.w0_sq.array().sqrt();
  const Vector w_star_sq = w_star.array().square();

  // Squared loss on f(w, x) = <x, w^2> against y = <x, w_*^2>.
  PredictFn predict = [](const Vector& w, const Vector& x) {
    return x.dot(Vector(w.array().square()));
  };
  GradLossFn grad_loss = [&predict](const Vector& w, const Vector& x, double y) {
    const double residual = y - predict(w, x);
    return Vector(-2.0 * residual * x.array() * w.array());
  };

  std::vector<RunRecord> runs;
  runs.reserve(config.seeds.size());
  for (std::uint64_t seed : config.seeds) {
    Rng rng(seed);
    RunRecord run;
    run.seed = seed;
    Vector w = w0;
    for (long step = 1; step <= config.steps; ++step) {
      const Vector x = rng.normal_vector(dim);
      const double mismatch = x.dot(w_star_sq - Vector(w.array().square()));
      w += 2.0 * config.eta * mismatch * x.cwiseProduct(w);
      if (w.norm() > kDivergenceNorm) {
        run.aborted = true;
        break;
      }
      const double dist = (w - w_star).norm();
      if (run.converged_step < 0 && dist < kConvergenceDist) run.converged_step = step;
      if (should_record(step, config)) {
        RecordedStep rec;
        rec.step = step;
        rec.dist_to_target = dist;
        // Exact population risk: 1/2 sum_p (w_*^2 - w^2)_p^2.
        const Vector gap = w_star_sq - Vector(w.array().square());
        rec.emp_loss = 0.5 * gap.squaredNorm();
        rec.pop_loss = rec.emp_loss;
        rec.srel.reserve(config.track_pairs.size());
        for (const auto& [x_probe, xp_probe] : config.track_pairs) {
          const double y = x_probe.dot(w_star_sq);
          rec.srel.push_back(
              srel_generic(predict, grad_loss, w, x_probe, xp_probe, y, config.eta).value);
        }
        run.recorded.push_back(std::move(rec));
      }
    }
    run.final_w = w;
    runs.push_back(std::move(run));
  }
  return runs;
}

std::vector<RunRecord> sgd_relu(const ReluFlowSpec& spec, const SgdConfig& config) {
  config.validate();
  const Eigen::Index dim = spec.w_star.size();

  PredictFn predict = [](const Vector& w, const Vector& x) {
    return std::max(0.0, w.dot(x));
  };
  // Gradient proxy of the indicator-gated squared loss; matches the
  // training update so the fictitious step is one SGD step.
  GradLossFn grad_loss = [](const Vector& w, const Vector& x, double y) {
    if (y <= 0.0) return Vector(Vector::Zero(x.size()));
    return Vector(-(y - w.dot(x)) * x);
  };

  // Held-out sample for the empirical risk.
  std::vector<RunRecord> runs;
  runs.reserve(config.seeds.size());
  for (std::uint64_t seed : config.seeds) {
    Rng rng(seed);
    Rng eval_rng(seed ^ 0x9e3779b97f4a7c15ull);
    Matrix eval_x(config.eval_samples, dim);
    Vector eval_y(config.eval_samples);
    for (int i = 0; i < config.eval_samples; ++i) {
      const Vector x = eval_rng.normal_vector(dim);
      eval_x.row(i) = x.transpose();
      eval_y(i) = std::max(0.0, spec.w_star.dot(x));
    }

    RunRecord run;
    run.seed = seed;
    Vector w = spec.w0;
    for (long step = 1; step <= config.steps; ++step) {
      const Vector x = rng.normal_vector(dim);
      const double y = std::max(0.0, spec.w_star.dot(x));
      if (y > 0.0) {
        w += config.eta * (y - w.dot(x)) * x;
      }
      if (w.norm() > kDivergenceNorm) {
        run.aborted = true;
        break;
      }
      const double dist = (w - spec.w_star).norm();
      if (run.converged_step < 0 && dist < kConvergenceDist) run.converged_step = step;
      if (should_record(step, config)) {
        RecordedStep rec;
        rec.step = step;
        rec.dist_to_target = dist;
        const Vector margins = eval_x * w;
        double loss = 0.0;
        for (int i = 0; i < config.eval_samples; ++i) {
          if (eval_y(i) > 0.0) {
            const double r = eval_y(i) - margins(i);
            loss += 0.5 * r * r;
          }
        }
        rec.emp_loss = loss / double(config.eval_samples);
        // Population risk under the gated quadratic form, via the sample M.
        const Vector gap = w - spec.w_star;
        rec.pop_loss = 0.5 * gap.dot(spec.m * gap);
        rec.srel.reserve(config.track_pairs.size());
        for (const auto& [x_probe, xp_probe] : config.track_pairs) {
          const double y_probe = std::max(0.0, spec.w_star.dot(x_probe));
          rec.srel.push_back(
              srel_generic(predict, grad_loss, w, x_probe, xp_probe, y_probe, config.eta).value);
        }
        run.recorded.push_back(std::move(rec));
      }
    }
    run.final_w = w;
    runs.push_back(std::move(run));
  }
  return runs;
}

double last_layer_loss(const LinearFlowSpec& spec, const Matrix& w) {
  double quad = 0.0;
  double cross = 0.0;
  for (Eigen::Index q = 0; q < w.rows(); ++q) {
    quad += w.row(q).dot((spec.m * w.row(q).transpose()));
    cross += w.row(q).dot(spec.u.row(q));
  }
  return 0.5 - cross + 0.5 * quad;
}

RunRecord gd_last_layer(const LinearFlowSpec& spec, const LastLayerProbe& probe,
                        const SgdConfig& config) {
  config.validate();
  const double step_size = spec.theta * spec.theta;

  RunRecord run;
  run.seed = config.seeds.front();
  Matrix w = spec.w0;
  double prev_loss = last_layer_loss(spec, w);
  int rising_records = 0;
  for (long step = 1; step <= config.steps; ++step) {
    // dL/dw_q = M w_q - beta^2 u_q
    w -= step_size * (w * spec.m.transpose() - spec.beta_sq * spec.u);
    if (should_record(step, config)) {
      RecordedStep rec;
      rec.step = step;
      rec.emp_loss = last_layer_loss(spec, w);
      rec.srel.push_back(srel_last_layer_closed_form(w, probe.h_ki, probe.sampled_class,
                                                     probe.h_cj, spec.lambda1, spec.n_total));
      if (rec.emp_loss > prev_loss) {
        if (++rising_records >= 10) {
          run.unstable = true;
          run.recorded.push_back(std::move(rec));
          break;
        }
      } else {
        rising_records = 0;
      }
      prev_loss = rec.emp_loss;
      run.recorded.push_back(std::move(rec));
    }
  }
  run.final_w = Eigen::Map<const Vector>(w.data(), w.size());
  return run;
}

SRelSeries aggregate_runs(const std::vector<RunRecord>& runs,
                          const std::vector<std::string>& pair_ids) {
  if (runs.empty()) throw ParameterError("aggregate_runs: no runs");

  std::vector<const RunRecord*> ordered;
  ordered.reserve(runs.size());
  for (const auto& run : runs) ordered.push_back(&run);
  std::sort(ordered.begin(), ordered.end(),
            [](const RunRecord* a, const RunRecord* b) { return a->seed < b->seed; });

  const auto& grid = ordered.front()->recorded;
  for (const RunRecord* run : ordered) {
    if (run->recorded.size() != grid.size()) {
      throw ParameterError("aggregate_runs: runs do not share one step grid");
    }
    for (size_t i = 0; i < grid.size(); ++i) {
      if (run->recorded[i].step != grid[i].step) {
        throw ParameterError("aggregate_runs: runs do not share one step grid");
      }
    }
  }

  SRelSeries series;
  series.pair_ids = pair_ids;
  series.times.reserve(grid.size());
  for (const auto& rec : grid) series.times.push_back(double(rec.step));
  for (const RunRecord* run : ordered) {
    series.run_ids.push_back(run->seed);
    std::vector<std::vector<std::optional<double>>> slice;
    slice.reserve(run->recorded.size());
    for (const auto& rec : run->recorded) {
      std::vector<std::optional<double>> row = rec.srel;
      row.resize(pair_ids.size());
      slice.push_back(std::move(row));
    }
    series.values.push_back(std::move(slice));
  }
  series.recompute_aggregates();
  return series;
}

}  // namespace elast
