#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace smcf {

/// Square matrix whose nonzeros lie within `half_bandwidth` of the diagonal
/// modulo n, i.e. a banded matrix with wrap-around corner blocks as produced
/// by periodic finite element assembly.
///
/// Entries are addressed by (row, offset) with offset in [-b, b]; column is
/// (row + offset) mod n. On very small meshes two offsets can alias the same
/// column, in which case the stored contributions are summed.
class PeriodicBandedMatrix {
 public:
  PeriodicBandedMatrix() = default;
  PeriodicBandedMatrix(std::size_t n, std::size_t half_bandwidth);

  std::size_t size() const { return n_; }
  std::size_t half_bandwidth() const { return b_; }

  void add(std::size_t row, std::ptrdiff_t offset, double value) {
    bands_[row * width() + static_cast<std::size_t>(offset + static_cast<std::ptrdiff_t>(b_))] += value;
  }
  double stored(std::size_t row, std::ptrdiff_t offset) const {
    return bands_[row * width() + static_cast<std::size_t>(offset + static_cast<std::ptrdiff_t>(b_))];
  }

  /// Value of A(i, j), summing aliased offsets.
  double entry(std::size_t i, std::size_t j) const;

  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> multiply(std::span<const double> x) const;

  /// this += alpha * other (same shape).
  PeriodicBandedMatrix& add_scaled(double alpha, const PeriodicBandedMatrix& other);

  bool is_symmetric(double tol) const;

  /// Dense copy, row-major; for tests and diagnostics.
  std::vector<double> to_dense() const;

 private:
  std::size_t width() const { return 2 * b_ + 1; }

  std::size_t n_ = 0;
  std::size_t b_ = 0;
  std::vector<double> bands_;
};

/// Cholesky factorization of a symmetric positive definite periodic banded
/// matrix. The last b unknowns are treated as a border: the interior block is
/// strictly banded and factored in O(n b^2); the border is closed by a dense
/// b x b Schur complement.
class PeriodicCholesky {
 public:
  /// Returns nullopt when the matrix is not positive definite.
  static std::optional<PeriodicCholesky> factor(const PeriodicBandedMatrix& a);

  void solve_in_place(std::span<double> rhs) const;
  std::vector<double> solve(std::span<const double> rhs) const;

  std::size_t size() const { return n_; }

 private:
  PeriodicCholesky() = default;

  void interior_solve(std::span<double> x) const;

  std::size_t n_ = 0;
  std::size_t b_ = 0;
  std::size_t m_ = 0;                // interior size n - b
  std::vector<double> lower_;        // interior factor, lower_[i*(b+1) + k] = L(i, i-k)
  std::vector<double> border_;       // C, m x b row-major
  std::vector<double> border_solved_;  // B^{-1} C, m x b row-major
  std::vector<double> schur_factor_;   // dense Cholesky of D - C^T B^{-1} C, b x b
};

}  // namespace smcf
