#pragma once

#include <span>
#include <vector>

namespace extremal {

/// Symmetric band matrix storing the diagonal and `bandwidth` superdiagonals.
class SymmetricBand {
 public:
  SymmetricBand(std::size_t size, std::size_t bandwidth)
      : size_(size), bw_(bandwidth), data_(size * (bandwidth + 1), 0.0) {}

  std::size_t size() const noexcept { return size_; }
  std::size_t bandwidth() const noexcept { return bw_; }

  /// Entry (i, i + k), 0 <= k <= bandwidth.
  double& at(std::size_t i, std::size_t k) { return data_[i * (bw_ + 1) + k]; }
  double at(std::size_t i, std::size_t k) const { return data_[i * (bw_ + 1) + k]; }

  void multiply(std::span<const double> x, std::span<double> y) const;

 private:
  std::size_t size_;
  std::size_t bw_;
  std::vector<double> data_;
};

/// LDL^T without pivoting. Valid for positive definite input; for indefinite
/// input it still reports the inertia through the pivot signs (Sylvester),
/// which is how semistability of a discrete state is read off.
class BandLDLT {
 public:
  explicit BandLDLT(const SymmetricBand& a);

  bool ok() const noexcept { return ok_; }
  std::size_t negative_pivots() const noexcept { return negative_; }
  double min_pivot() const noexcept { return min_pivot_; }

  void solve_in_place(std::span<double> b) const;

 private:
  std::size_t size_;
  std::size_t bw_;
  std::vector<double> l_;  // unit lower factor stored by rows: l_(i, i - k)
  std::vector<double> d_;
  std::size_t negative_ = 0;
  double min_pivot_ = 0.0;
  bool ok_ = true;
};

}  // namespace extremal
