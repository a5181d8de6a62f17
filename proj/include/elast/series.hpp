#pragma once

#include <optional>
#include <string>
#include <vector>

namespace elast {

// Time-indexed S_rel values for a set of probe pairs, one slice per run,
// with per-step mean/std taken over the runs where the value was defined.
struct SRelSeries {
  std::vector<double> times;           // ascending
  std::vector<std::string> pair_ids;
  std::vector<std::uint64_t> run_ids;  // seed of each run, ascending

  // values[run][time][pair]; empty optional = undefined at that step
  std::vector<std::vector<std::vector<std::optional<double>>>> values;

  // aggregates[time][pair]
  std::vector<std::vector<std::optional<double>>> mean;
  std::vector<std::vector<std::optional<double>>> stddev;  // population std
  std::vector<std::vector<int>> defined_count;

  void recompute_aggregates();

  // Mean series for one pair, skipping undefined steps; `times_out`
  // receives the matching time stamps.
  std::vector<double> mean_curve(int pair, std::vector<double>* times_out = nullptr) const;
};

}  // namespace elast
