#include "extremal/radial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "extremal/error.hpp"

namespace extremal {

RadialGrid::RadialGrid(int n, int M) : n_(n), M_(M) {
  if (n < 1) throw DomainError("dimension must be at least 1");
  if (M < 64) throw DomainError("grid needs at least 64 intervals");
  h_ = 1.0 / M;
  sphere_ = 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
  r_.resize(M + 1);
  cell_.resize(M + 1);
  weight_.resize(M + 1);
  face_.resize(M);
  for (int i = 0; i <= M; ++i) r_[i] = i * h_;
  auto moment = [n](double r) { return std::pow(r, n) / n; };
  for (int i = 0; i <= M; ++i) {
    const double lo = i == 0 ? 0.0 : (i - 0.5) * h_;
    const double hi = i == M ? 1.0 : (i + 0.5) * h_;
    cell_[i] = moment(hi) - moment(lo);
    weight_[i] = sphere_ * cell_[i];
  }
  for (int i = 0; i < M; ++i) face_[i] = std::pow((i + 0.5) * h_, n - 1) / h_;
}

RadialGrid discretize(int n, int M) { return RadialGrid(n, M); }

SymmetricBand RadialGrid::stiffness() const {
  SymmetricBand k(static_cast<std::size_t>(M_), 1);
  for (int i = 0; i < M_; ++i) {
    k.at(i, 0) = face_[i] + (i > 0 ? face_[i - 1] : 0.0);
    if (i + 1 < M_) k.at(i, 1) = -face_[i];
  }
  return k;
}

std::vector<double> RadialGrid::laplacian(std::span<const double> phi) const {
  std::vector<double> out(M_);
  for (int i = 0; i < M_; ++i) {
    double flux = face_[i] * (phi[i + 1] - phi[i]);
    if (i > 0) flux -= face_[i - 1] * (phi[i] - phi[i - 1]);
    out[i] = flux / cell_[i];
  }
  return out;
}

double RadialGrid::integrate(std::span<const double> phi) const {
  double s = 0.0;
  for (int i = 0; i <= M_; ++i) s += weight_[i] * phi[i];
  return s;
}

double RadialState::max_u() const {
  return u.empty() ? 0.0 : *std::max_element(u.begin(), u.end());
}

// ---------------------------------------------------------------------------

namespace {

// v = -Delta_h u on the free nodes, v[M] = 0.
std::vector<double> minus_laplacian(const RadialGrid& grid, std::span<const double> u) {
  auto lap = grid.laplacian(u);
  std::vector<double> v(lap.size() + 1, 0.0);
  for (std::size_t i = 0; i < lap.size(); ++i) v[i] = -lap[i];
  return v;
}

double row_residual(double terms_sum, double abs_sum) {
  return abs_sum == 0.0 ? 0.0 : std::abs(terms_sum) / abs_sum;
}

// Residual vector G = K v - lambda C f(u), with v = C^{-1} K u.
std::vector<double> reduced_residual(const RadialGrid& grid, const Nonlinearity& nl, double lambda,
                                     std::span<const double> u, std::span<const double> v) {
  const int M = grid.intervals();
  const auto face = grid.faces();
  const auto cell = grid.cells();
  std::vector<double> g(M);
  for (int i = 0; i < M; ++i) {
    double kv = face[i] * (v[i] - v[i + 1]);
    if (i > 0) kv += face[i - 1] * (v[i] - v[i - 1]);
    g[i] = kv - lambda * cell[i] * nl.f(u[i]);
  }
  return g;
}

SymmetricBand biharmonic(const RadialGrid& grid) {
  const int M = grid.intervals();
  const auto k = grid.stiffness();
  const auto c = grid.cells();
  auto K = [&](int i, int j) -> double {
    if (i < 0 || j < 0 || i >= M || j >= M) return 0.0;
    if (i == j) return k.at(i, 0);
    if (j == i + 1) return k.at(i, 1);
    if (i == j + 1) return k.at(j, 1);
    return 0.0;
  };
  SymmetricBand b(static_cast<std::size_t>(M), 2);
  for (int i = 0; i < M; ++i) {
    for (int off = 0; off <= 2 && i + off < M; ++off) {
      const int j = i + off;
      double s = 0.0;
      for (int m = std::max(0, j - 1); m <= std::min(M - 1, i + 1); ++m) s += K(i, m) * K(m, j) / c[m];
      b.at(i, off) = s;
    }
  }
  return b;
}

struct Attempt {
  bool converged = false;
  bool clamped = false;
  bool stable = false;
  std::vector<double> u;
  std::vector<double> v;
  double residual = 0.0;
  int iterations = 0;
};

double clamp_limit(const Nonlinearity& nl, const SolveOptions& opts) {
  return nl.singular() ? nl.a_f() - opts.singular_clamp : std::numeric_limits<double>::infinity();
}

bool all_finite(std::span<const double> xs) {
  return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

double norm2(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x * x;
  return std::sqrt(s);
}

Attempt newton(const RadialGrid& grid, const Nonlinearity& nl, double lambda,
               std::vector<double> u, const SolveOptions& opts, int max_iter) {
  const int M = grid.intervals();
  const double limit = clamp_limit(nl, opts);
  const auto cell = grid.cells();
  const SymmetricBand base = biharmonic(grid);
  Attempt out;
  bool clamped = false;
  for (int it = 0; it <= max_iter; ++it) {
    auto v = minus_laplacian(grid, u);
    const double res = coupled_residual(grid, nl, lambda, u, v);
    if (!std::isfinite(res)) return out;
    if (res < opts.tolerance) {
      out.converged = true;
      out.clamped = clamped;
      out.residual = res;
      out.iterations = it;
      const BandLDLT ldlt(fourth_order_jacobian(grid, nl, lambda, u));
      out.stable = ldlt.ok() && ldlt.negative_pivots() == 0;
      out.u = std::move(u);
      out.v = std::move(v);
      return out;
    }
    if (it == max_iter) break;

    auto g = reduced_residual(grid, nl, lambda, u, v);
    const double merit = norm2(g);
    SymmetricBand jac = base;
    for (int i = 0; i < M; ++i) jac.at(i, 0) -= lambda * cell[i] * nl.df(u[i]);
    const BandLDLT ldlt(jac);
    if (!ldlt.ok()) return out;
    std::vector<double> step = g;
    ldlt.solve_in_place(step);

    double s = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 12; ++ls, s *= 0.5) {
      std::vector<double> trial(u);
      bool hit = false;
      for (int i = 0; i < M; ++i) {
        trial[i] = u[i] - s * step[i];
        if (trial[i] >= limit) {
          trial[i] = limit;
          hit = true;
        }
      }
      if (!all_finite(trial)) continue;
      const auto tv = minus_laplacian(grid, trial);
      const auto tg = reduced_residual(grid, nl, lambda, trial, tv);
      if (!all_finite(tg)) continue;
      if (norm2(tg) < (1.0 - 1e-4 * s) * merit) {
        u = std::move(trial);
        clamped = hit;
        accepted = true;
        break;
      }
    }
    if (!accepted) return out;
  }
  return out;
}

Attempt picard(const RadialGrid& grid, const Nonlinearity& nl, double lambda,
               const SolveOptions& opts) {
  const int M = grid.intervals();
  const double limit = clamp_limit(nl, opts);
  const auto cell = grid.cells();
  const BandLDLT ldlt(biharmonic(grid));
  Attempt out;
  std::vector<double> u(M + 1, 0.0);
  std::vector<double> next(M);
  for (int it = 1; it <= opts.max_picard; ++it) {
    for (int i = 0; i < M; ++i) next[i] = lambda * cell[i] * nl.f(u[i]);
    ldlt.solve_in_place(next);
    double change = 0.0;
    double size = 0.0;
    for (int i = 0; i < M; ++i) {
      if (!std::isfinite(next[i]) || next[i] >= limit) return out;  // left the domain
      change = std::max(change, std::abs(next[i] - u[i]));
      size = std::max(size, std::abs(next[i]));
      u[i] = next[i];
    }
    if (change <= opts.picard_step_tol * (1.0 + size)) {
      out.iterations = it;
      // Polish to the residual tolerance; the nearest root is the minimal one.
      Attempt polished = newton(grid, nl, lambda, u, opts, 10);
      double drift = 0.0;
      if (polished.converged) {
        for (int i = 0; i < M; ++i) drift = std::max(drift, std::abs(polished.u[i] - u[i]));
      }
      if (polished.converged && !polished.clamped && drift <= opts.agreement * (1.0 + size)) {
        polished.iterations = it;
        return polished;
      }
      out.u = u;
      out.v = minus_laplacian(grid, u);
      out.residual = coupled_residual(grid, nl, lambda, out.u, out.v);
      out.converged = out.residual < 1e3 * opts.tolerance;
      out.stable = out.converged;
      return out;
    }
  }
  return out;
}

double max_difference(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

double coupled_residual(const RadialGrid& grid, const Nonlinearity& nl, double lambda,
                        std::span<const double> u, std::span<const double> v) {
  const int M = grid.intervals();
  const auto face = grid.faces();
  const auto cell = grid.cells();
  double worst = 0.0;
  for (int i = 0; i < M; ++i) {
    // K u - C v
    double s1 = face[i] * (u[i] - u[i + 1]) - cell[i] * v[i];
    double a1 = face[i] * (std::abs(u[i]) + std::abs(u[i + 1])) + cell[i] * std::abs(v[i]);
    // K v - lambda C f(u)
    const double fu = lambda * cell[i] * nl.f(u[i]);
    double s2 = face[i] * (v[i] - v[i + 1]) - fu;
    double a2 = face[i] * (std::abs(v[i]) + std::abs(v[i + 1])) + std::abs(fu);
    if (i > 0) {
      s1 += face[i - 1] * (u[i] - u[i - 1]);
      a1 += face[i - 1] * (std::abs(u[i]) + std::abs(u[i - 1]));
      s2 += face[i - 1] * (v[i] - v[i - 1]);
      a2 += face[i - 1] * (std::abs(v[i]) + std::abs(v[i - 1]));
    }
    worst = std::max({worst, row_residual(s1, a1), row_residual(s2, a2)});
    if (!std::isfinite(s2)) return std::numeric_limits<double>::infinity();
  }
  return worst;
}

SymmetricBand fourth_order_jacobian(const RadialGrid& grid, const Nonlinearity& nl, double lambda,
                                    std::span<const double> u) {
  SymmetricBand jac = biharmonic(grid);
  const auto cell = grid.cells();
  for (int i = 0; i < grid.intervals(); ++i) jac.at(i, 0) -= lambda * cell[i] * nl.df(u[i]);
  return jac;
}

RadialState solve_at_lambda(const RadialGrid& grid, const Nonlinearity& nl, double lambda,
                            const RadialState* init, const SolveOptions& opts) {
  if (!(lambda >= 0.0)) throw DomainError("lambda must be nonnegative");
  const int M = grid.intervals();
  RadialState state;
  state.lambda = lambda;
  if (lambda == 0.0) {
    state.u.assign(M + 1, 0.0);
    state.v.assign(M + 1, 0.0);
    state.method = "exact";
    return state;
  }
  std::vector<double> start(M + 1, 0.0);
  if (init != nullptr) {
    if (static_cast<int>(init->u.size()) != M + 1) {
      throw DomainError("initial state does not match the grid");
    }
    if (!(init->max_u() < nl.a_f())) throw DomainError("initial state is not below a_f");
    start = init->u;
  }

  const Attempt nw = newton(grid, nl, lambda, start, opts, opts.max_newton);
  const bool newton_good = nw.converged && nw.stable && !nw.clamped;
  auto finish = [&](const Attempt& a, const char* method, int newton_iters, int picard_iters) {
    state.u = a.u;
    state.v = a.v;
    state.u[M] = 0.0;
    state.v[M] = 0.0;
    state.residual = a.residual;
    state.newton_iters = newton_iters;
    state.picard_iters = picard_iters;
    state.method = method;
    return state;
  };
  if (newton_good && !opts.cross_check) return finish(nw, "newton", nw.iterations, 0);

  const Attempt pc = picard(grid, nl, lambda, opts);
  if (pc.converged) {
    if (newton_good && max_difference(nw.u, pc.u) <= opts.agreement) {
      return finish(nw, "newton", nw.iterations, pc.iterations);
    }
    return finish(pc, "picard", 0, pc.iterations);
  }
  if (newton_good) return finish(nw, "newton", nw.iterations, 0);
  if (nw.converged && nw.clamped) {
    throw SingularTouch("iterate reached a_f at lambda = " + std::to_string(lambda));
  }
  throw NoSolution("no minimal solution found at lambda = " + std::to_string(lambda));
}

}  // namespace extremal
