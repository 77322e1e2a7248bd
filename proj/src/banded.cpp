#include "smcf/banded.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace smcf {

namespace {
// Pivots below this fraction of the original diagonal are treated as zero.
constexpr double kPivotTolerance = 1e-12;
}  // namespace

PeriodicBandedMatrix::PeriodicBandedMatrix(std::size_t n, std::size_t half_bandwidth)
    : n_(n), b_(half_bandwidth), bands_(n * (2 * half_bandwidth + 1), 0.0) {
  if (n == 0) throw std::invalid_argument("PeriodicBandedMatrix: empty matrix");
  if (n <= half_bandwidth)
    throw std::invalid_argument("PeriodicBandedMatrix: dimension must exceed half bandwidth");
}

double PeriodicBandedMatrix::entry(std::size_t i, std::size_t j) const {
  if (n_ > 2 * b_ + 1) {
    // No aliasing: at most one offset reaches column j.
    auto o = static_cast<std::ptrdiff_t>(j) - static_cast<std::ptrdiff_t>(i);
    const auto n = static_cast<std::ptrdiff_t>(n_);
    if (2 * o > n) o -= n;
    else if (2 * o < -n) o += n;
    return std::abs(o) <= static_cast<std::ptrdiff_t>(b_) ? stored(i, o) : 0.0;
  }
  double sum = 0.0;
  const auto b = static_cast<std::ptrdiff_t>(b_);
  const auto n = static_cast<std::ptrdiff_t>(n_);
  for (std::ptrdiff_t o = -b; o <= b; ++o) {
    const auto col = static_cast<std::size_t>(((static_cast<std::ptrdiff_t>(i) + o) % n + n) % n);
    if (col == j) sum += stored(i, o);
  }
  return sum;
}

void PeriodicBandedMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  const auto b = static_cast<std::ptrdiff_t>(b_);
  const auto n = static_cast<std::ptrdiff_t>(n_);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double acc = 0.0;
    const double* row = &bands_[static_cast<std::size_t>(i) * width()];
    for (std::ptrdiff_t o = -b; o <= b; ++o) {
      std::ptrdiff_t col = i + o;
      if (col < 0) col += n;
      if (col >= n) col -= n;
      acc += row[o + b] * x[static_cast<std::size_t>(col)];
    }
    y[static_cast<std::size_t>(i)] = acc;
  }
}

std::vector<double> PeriodicBandedMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(n_);
  multiply(x, y);
  return y;
}

PeriodicBandedMatrix& PeriodicBandedMatrix::add_scaled(double alpha,
                                                       const PeriodicBandedMatrix& other) {
  if (other.n_ != n_ || other.b_ != b_)
    throw std::invalid_argument("PeriodicBandedMatrix::add_scaled: shape mismatch");
  for (std::size_t k = 0; k < bands_.size(); ++k) bands_[k] += alpha * other.bands_[k];
  return *this;
}

bool PeriodicBandedMatrix::is_symmetric(double tol) const {
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j)
      if (std::abs(entry(i, j) - entry(j, i)) > tol) return false;
  return true;
}

std::vector<double> PeriodicBandedMatrix::to_dense() const {
  std::vector<double> dense(n_ * n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) dense[i * n_ + j] = entry(i, j);
  return dense;
}

std::optional<PeriodicCholesky> PeriodicCholesky::factor(const PeriodicBandedMatrix& a) {
  PeriodicCholesky f;
  f.n_ = a.size();
  f.b_ = a.half_bandwidth();
  f.m_ = f.n_ - f.b_;
  const std::size_t n = f.n_, b = f.b_, m = f.m_;
  const std::size_t w = b + 1;

  // Interior block B = A[0:m, 0:m] is strictly banded since m = n - b.
  f.lower_.assign(m * w, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t k0 = i >= b ? i - b : 0;
    for (std::size_t k = k0; k <= i; ++k) {
      double s = a.entry(i, k);
      const std::size_t l0 = std::max(k0, k >= b ? k - b : 0);
      for (std::size_t l = l0; l < k; ++l) s -= f.lower_[i * w + (i - l)] * f.lower_[k * w + (k - l)];
      if (k == i) {
        if (!(s > kPivotTolerance * std::abs(a.entry(i, i)))) return std::nullopt;
        f.lower_[i * w] = std::sqrt(s);
      } else {
        f.lower_[i * w + (i - k)] = s / f.lower_[k * w];
      }
    }
  }

  f.border_.assign(m * b, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t c = 0; c < b; ++c) f.border_[i * b + c] = a.entry(i, m + c);

  f.border_solved_.assign(m * b, 0.0);
  std::vector<double> column(m);
  for (std::size_t c = 0; c < b; ++c) {
    for (std::size_t i = 0; i < m; ++i) column[i] = f.border_[i * b + c];
    f.interior_solve(column);
    for (std::size_t i = 0; i < m; ++i) f.border_solved_[i * b + c] = column[i];
  }

  // Schur complement S = D - C^T B^{-1} C, then dense Cholesky in place.
  std::vector<double> s(b * b);
  for (std::size_t r = 0; r < b; ++r)
    for (std::size_t c = 0; c < b; ++c) {
      double v = a.entry(m + r, m + c);
      for (std::size_t i = 0; i < m; ++i) v -= f.border_[i * b + r] * f.border_solved_[i * b + c];
      s[r * b + c] = v;
    }
  for (std::size_t j = 0; j < b; ++j) {
    double d = s[j * b + j];
    for (std::size_t k = 0; k < j; ++k) d -= s[j * b + k] * s[j * b + k];
    if (!(d > kPivotTolerance * std::abs(a.entry(m + j, m + j)))) return std::nullopt;
    s[j * b + j] = std::sqrt(d);
    for (std::size_t i = j + 1; i < b; ++i) {
      double v = s[i * b + j];
      for (std::size_t k = 0; k < j; ++k) v -= s[i * b + k] * s[j * b + k];
      s[i * b + j] = v / s[j * b + j];
    }
  }
  f.schur_factor_ = std::move(s);
  (void)n;
  return f;
}

void PeriodicCholesky::interior_solve(std::span<double> x) const {
  const std::size_t b = b_, m = m_, w = b + 1;
  for (std::size_t i = 0; i < m; ++i) {
    double s = x[i];
    const std::size_t l0 = i >= b ? i - b : 0;
    for (std::size_t l = l0; l < i; ++l) s -= lower_[i * w + (i - l)] * x[l];
    x[i] = s / lower_[i * w];
  }
  for (std::size_t ii = m; ii-- > 0;) {
    double s = x[ii];
    const std::size_t l1 = std::min(m, ii + b + 1);
    for (std::size_t l = ii + 1; l < l1; ++l) s -= lower_[l * w + (l - ii)] * x[l];
    x[ii] = s / lower_[ii * w];
  }
}

void PeriodicCholesky::solve_in_place(std::span<double> rhs) const {
  if (rhs.size() != n_) throw std::invalid_argument("PeriodicCholesky::solve: size mismatch");
  const std::size_t b = b_, m = m_;
  auto interior = rhs.first(m);
  auto tail = rhs.subspan(m);
  interior_solve(interior);
  // g - C^T y
  for (std::size_t r = 0; r < b; ++r) {
    double v = tail[r];
    for (std::size_t i = 0; i < m; ++i) v -= border_[i * b + r] * interior[i];
    tail[r] = v;
  }
  for (std::size_t i = 0; i < b; ++i) {
    double v = tail[i];
    for (std::size_t k = 0; k < i; ++k) v -= schur_factor_[i * b + k] * tail[k];
    tail[i] = v / schur_factor_[i * b + i];
  }
  for (std::size_t ii = b; ii-- > 0;) {
    double v = tail[ii];
    for (std::size_t k = ii + 1; k < b; ++k) v -= schur_factor_[k * b + ii] * tail[k];
    tail[ii] = v / schur_factor_[ii * b + ii];
  }
  for (std::size_t i = 0; i < m; ++i) {
    double v = interior[i];
    for (std::size_t c = 0; c < b; ++c) v -= border_solved_[i * b + c] * tail[c];
    interior[i] = v;
  }
}

std::vector<double> PeriodicCholesky::solve(std::span<const double> rhs) const {
  std::vector<double> x(rhs.begin(), rhs.end());
  solve_in_place(x);
  return x;
}

}  // namespace smcf
