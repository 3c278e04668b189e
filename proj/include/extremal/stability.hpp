#pragma once

#include <vector>

#include "extremal/radial.hpp"

namespace extremal {

/// Symmetric tridiagonal matrix: diag[0..m-1], off[0..m-2].
struct Tridiagonal {
  std::vector<double> diag;
  std::vector<double> off;

  std::size_t size() const noexcept { return diag.size(); }
  /// Number of eigenvalues strictly below x (Sturm count).
  std::size_t count_below(double x) const;
};

/// C^{-1/2} K C^{-1/2} - diag(sqrt(lambda f'(u))): the radial operator
/// -Delta - sqrt(lambda f'(u)) symmetrised with the cell measures, so its
/// eigenvalues are those of K phi - C sqrt(lambda f') phi = mu C phi.
Tridiagonal stability_operator(const RadialGrid& grid, const Nonlinearity& nl,
                               const RadialState& state);

struct Eigenpair {
  double value = 0.0;
  std::vector<double> vector;  // unit Euclidean norm, first entry >= 0
  int iterations = 0;
};

/// Smallest eigenpair: Sturm bisection to a bracket, then shifted inverse
/// iteration until successive Rayleigh quotients agree within tol. Throws
/// NonConvergence when the iteration stalls.
Eigenpair smallest_eigenpair(const Tridiagonal& t, double tol = 1e-9);

struct StabilityReport {
  double lambda = 0.0;
  double mu_min = 0.0;
  int eigvec_sign_changes = 0;
  int iterations = 0;
  bool semistable(double tol = 1e-6) const { return mu_min >= -tol; }
};

StabilityReport stability_eigenvalue(const RadialGrid& grid, const Nonlinearity& nl,
                                     const RadialState& state, double tol = 1e-9);

}  // namespace extremal
