#pragma once

#include <cstddef>
#include <span>

namespace smcf {

/// Sample mean with standard error stddev / sqrt(count); se is 0 for a
/// single sample.
struct MeanEstimate {
  double mean = 0.0;
  double se = 0.0;
  std::size_t count = 0;
};

/// Streaming (Welford) mean and variance; feeding the same values in the
/// same order gives bit-identical results.
class RunningMean {
 public:
  void add(double value);
  std::size_t count() const { return count_; }
  MeanEstimate estimate() const;

 private:
  std::size_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Accumulates in index order so the result is independent of scheduling.
MeanEstimate estimate_mean(std::span<const double> samples);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace smcf
