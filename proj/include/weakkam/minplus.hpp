#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace weakkam {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Square row-major matrix over the (min,+) semiring; +∞ is the zero.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  explicit DenseMatrix(std::size_t n, double fill = kInfinity) : n_(n), data_(n * n, fill) {}

  /// Min-plus identity: 0 on the diagonal, +∞ elsewhere.
  static DenseMatrix identity(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * n_ + j]; }
  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * n_, n_}; }
  std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * n_, n_}; }
  const std::vector<double>& data() const noexcept { return data_; }
  std::vector<double>& data() noexcept { return data_; }

  bool operator==(const DenseMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// (A ⊗ B)(i,j) = min_k A(i,k) + B(k,j). Rows are computed in parallel.
DenseMatrix minplus_product(const DenseMatrix& a, const DenseMatrix& b);

/// A^{⊗n} for n ≥ 1 by binary powering: the running result is multiplied on
/// the right by A^{2^i} for each set bit i, lowest bit first.
DenseMatrix minplus_power(const DenseMatrix& a, std::size_t n);

/// (I ⊕ A)^{⊗m} = min over 0 ≤ k ≤ m of A^{⊗k}.
DenseMatrix minplus_window_power(const DenseMatrix& a, std::size_t m);

DenseMatrix elementwise_min(const DenseMatrix& a, const DenseMatrix& b);

/// sup |A − B| over entries; +∞ when finiteness patterns differ.
double sup_difference(const DenseMatrix& a, const DenseMatrix& b);

}  // namespace weakkam
