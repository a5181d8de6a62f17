#include "elast/series.hpp"

#include <cmath>

namespace elast {

void SRelSeries::recompute_aggregates() {
  const size_t n_times = times.size();
  const size_t n_pairs = pair_ids.size();
  mean.assign(n_times, std::vector<std::optional<double>>(n_pairs));
  stddev.assign(n_times, std::vector<std::optional<double>>(n_pairs));
  defined_count.assign(n_times, std::vector<int>(n_pairs, 0));

  for (size_t ti = 0; ti < n_times; ++ti) {
    for (size_t pi = 0; pi < n_pairs; ++pi) {
      double sum = 0.0;
      int count = 0;
      for (const auto& run : values) {
        const auto& v = run[ti][pi];
        if (v.has_value()) {
          sum += *v;
          count++;
        }
      }
      defined_count[ti][pi] = count;
      if (count == 0) continue;
      const double avg = sum / double(count);
      double sq = 0.0;
      for (const auto& run : values) {
        const auto& v = run[ti][pi];
        if (v.has_value()) sq += (*v - avg) * (*v - avg);
      }
      mean[ti][pi] = avg;
      stddev[ti][pi] = std::sqrt(sq / double(count));
    }
  }
}

std::vector<double> SRelSeries::mean_curve(int pair, std::vector<double>* times_out) const {
  std::vector<double> curve;
  if (times_out) times_out->clear();
  for (size_t ti = 0; ti < times.size(); ++ti) {
    const auto& v = mean[ti][pair];
    if (v.has_value()) {
      curve.push_back(*v);
      if (times_out) times_out->push_back(times[ti]);
    }
  }
  return curve;
}

}  // namespace elast
