#include "smcf/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace smcf {

MeanEstimate estimate_mean(std::span<const double> samples) {
  MeanEstimate est;
  est.count = samples.size();
  if (samples.empty()) return est;
  double sum = 0.0;
  for (double v : samples) sum += v;
  est.mean = sum / static_cast<double>(samples.size());
  if (samples.size() < 2) return est;
  double ss = 0.0;
  for (double v : samples) ss += (v - est.mean) * (v - est.mean);
  const double n = static_cast<double>(samples.size());
  est.se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  return est;
}

void RunningMean::add(double value) {
  ++count_;
  const double d = value - mean_;
  mean_ += d / static_cast<double>(count_);
  m2_ += d * (value - mean_);
}

MeanEstimate RunningMean::estimate() const {
  MeanEstimate est{mean_, 0.0, count_};
  if (count_ >= 2) {
    const double n = static_cast<double>(count_);
    est.se = std::sqrt(std::max(0.0, m2_) / (n - 1.0)) / std::sqrt(n);
  }
  return est;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("loglog_slope: need at least two matching points");
  double mx = 0.0, my = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace smcf
