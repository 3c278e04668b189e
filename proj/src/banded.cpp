#include "extremal/banded.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace extremal {

void SymmetricBand::multiply(std::span<const double> x, std::span<double> y) const {
  for (std::size_t i = 0; i < size_; ++i) {
    double s = at(i, 0) * x[i];
    for (std::size_t k = 1; k <= bw_; ++k) {
      if (i + k < size_) s += at(i, k) * x[i + k];
      if (i >= k) s += at(i - k, k) * x[i - k];
    }
    y[i] = s;
  }
}

BandLDLT::BandLDLT(const SymmetricBand& a)
    : size_(a.size()), bw_(a.bandwidth()), l_(a.size() * (a.bandwidth() + 1), 0.0), d_(a.size()) {
  min_pivot_ = std::numeric_limits<double>::infinity();
  auto L = [&](std::size_t i, std::size_t k) -> double& { return l_[i * (bw_ + 1) + k]; };
  for (std::size_t j = 0; j < size_; ++j) {
    // d_j = a_jj - sum_k l_{j,j-k}^2 d_{j-k}
    double dj = a.at(j, 0);
    for (std::size_t k = 1; k <= bw_ && k <= j; ++k) dj -= L(j, k) * L(j, k) * d_[j - k];
    if (dj == 0.0 || !std::isfinite(dj)) {
      ok_ = false;
      dj = dj == 0.0 ? std::numeric_limits<double>::min() : dj;
    }
    d_[j] = dj;
    if (dj < 0.0) ++negative_;
    min_pivot_ = std::min(min_pivot_, dj);
    // l_{i,j} for i = j+1 .. j+bw
    for (std::size_t m = 1; m <= bw_ && j + m < size_; ++m) {
      const std::size_t i = j + m;
      double s = a.at(j, m);
      for (std::size_t k = 1; k <= bw_ && k <= j; ++k) {
        const std::size_t c = j - k;  // column shared by rows i and j
        if (i - c > bw_) continue;
        s -= L(i, i - c) * L(j, k) * d_[c];
      }
      L(i, m) = s / dj;
    }
  }
}

void BandLDLT::solve_in_place(std::span<double> b) const {
  auto L = [&](std::size_t i, std::size_t k) { return l_[i * (bw_ + 1) + k]; };
  for (std::size_t i = 0; i < size_; ++i) {
    for (std::size_t k = 1; k <= bw_ && k <= i; ++k) b[i] -= L(i, k) * b[i - k];
  }
  for (std::size_t i = 0; i < size_; ++i) b[i] /= d_[i];
  for (std::size_t ii = size_; ii-- > 0;) {
    for (std::size_t k = 1; k <= bw_ && ii + k < size_; ++k) b[ii] -= L(ii + k, k) * b[ii + k];
  }
}

}  // namespace extremal
