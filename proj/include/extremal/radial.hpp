#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "extremal/banded.hpp"
#include "extremal/nonlinearity.hpp"

namespace extremal {

/// Equispaced radial grid r_i = i h on [0, 1] for the unit ball in R^n.
///
/// The Laplacian is a finite-volume discretisation on dual cells
/// [r_{i-1/2}, r_{i+1/2}] with exact cell measures int r^{n-1} dr. It is
/// symmetric in the weighted inner product, exact on quadratics, and at r = 0
/// reduces to Delta phi(0) = n phi''(0) = 2n (phi_1 - phi_0) / h^2.
class RadialGrid {
 public:
  RadialGrid(int n, int M);

  int dimension() const noexcept { return n_; }
  int intervals() const noexcept { return M_; }
  double spacing() const noexcept { return h_; }
  std::span<const double> radii() const noexcept { return r_; }
  /// int over the dual cell of r^{n-1} dr (no sphere factor).
  std::span<const double> cells() const noexcept { return cell_; }
  /// Quadrature weights for int_Omega phi dx; they sum to |B_1|.
  std::span<const double> weights() const noexcept { return weight_; }
  /// Face conductances r_{i+1/2}^{n-1} / h, i = 0..M-1.
  std::span<const double> faces() const noexcept { return face_; }
  double sphere_area() const noexcept { return sphere_; }
  double ball_volume() const noexcept { return sphere_ / n_; }

  /// Stiffness K restricted to the free nodes 0..M-1 (node M is Dirichlet).
  SymmetricBand stiffness() const;
  /// Delta_h phi at nodes 0..M-1; phi has M+1 entries.
  std::vector<double> laplacian(std::span<const double> phi) const;
  /// sum_i w_i phi_i over all M+1 nodes.
  double integrate(std::span<const double> phi) const;

 private:
  int n_;
  int M_;
  double h_;
  double sphere_;
  std::vector<double> r_;
  std::vector<double> cell_;
  std::vector<double> weight_;
  std::vector<double> face_;
};

/// Builds the grid; DomainError when n < 1 or M < 64.
RadialGrid discretize(int n, int M);

/// A converged discrete solution of -Delta u = v, -Delta v = lambda f(u)
/// with u = v = 0 at r = 1.
struct RadialState {
  double lambda = 0.0;
  std::vector<double> u;  // M+1 nodal values, u[M] = 0
  std::vector<double> v;  // M+1 nodal values, v[M] = 0
  double residual = 0.0;
  int newton_iters = 0;
  int picard_iters = 0;
  std::string method;     // "exact", "newton" or "picard"

  double u0() const { return u.empty() ? 0.0 : u.front(); }
  double max_u() const;
};

struct SolveOptions {
  double tolerance = 1e-10;   // relative residual of the coupled system
  int max_newton = 60;
  int max_picard = 5000;
  double picard_step_tol = 1e-11;
  double singular_clamp = 1e-12;
  /// Always run the monotone iteration and compare with Newton.
  bool cross_check = false;
  double agreement = 1e-6;
};

/// Relative residual of the coupled discrete system: per row the absolute
/// value of the sum of terms divided by the sum of absolute terms.
double coupled_residual(const RadialGrid& grid, const Nonlinearity& nl, double lambda,
                        std::span<const double> u, std::span<const double> v);

/// Minimal solution at lambda. Damped Newton from `init` (zero when absent);
/// a converged Newton iterate is accepted only when the linearised
/// fourth-order operator is positive definite, otherwise the monotone
/// iteration from the zero subsolution decides. Throws NoSolution when
/// neither converges and SingularTouch when the only candidate sits on the
/// clamp a_f - 1e-12.
RadialState solve_at_lambda(const RadialGrid& grid, const Nonlinearity& nl, double lambda,
                            const RadialState* init = nullptr, const SolveOptions& opts = {});

/// The linearised operator K C^{-1} K - lambda C f'(u) at a state.
SymmetricBand fourth_order_jacobian(const RadialGrid& grid, const Nonlinearity& nl,
                                    double lambda, std::span<const double> u);

}  // namespace extremal
