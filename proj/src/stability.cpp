#include "extremal/stability.hpp"

#include <algorithm>
#include <cmath>

#include "extremal/error.hpp"

namespace extremal {

std::size_t Tridiagonal::count_below(double x) const {
  std::size_t count = 0;
  double d = 1.0;
  for (std::size_t i = 0; i < diag.size(); ++i) {
    const double b2 = i == 0 ? 0.0 : off[i - 1] * off[i - 1];
    d = (diag[i] - x) - (i == 0 ? 0.0 : b2 / d);
    if (d == 0.0) d = -1e-300;
    if (d < 0.0) ++count;
  }
  return count;
}

Tridiagonal stability_operator(const RadialGrid& grid, const Nonlinearity& nl,
                               const RadialState& state) {
  const int M = grid.intervals();
  if (static_cast<int>(state.u.size()) != M + 1) {
    throw DomainError("state does not match the grid");
  }
  const auto k = grid.stiffness();
  const auto c = grid.cells();
  Tridiagonal t;
  t.diag.resize(M);
  t.off.resize(M - 1);
  for (int i = 0; i < M; ++i) {
    const double slope = nl.df(state.u[i]);
    if (!(slope >= 0.0) || !std::isfinite(slope)) {
      throw DomainError("f' is not finite and nonnegative on the state");
    }
    t.diag[i] = k.at(i, 0) / c[i] - std::sqrt(state.lambda * slope);
    if (i + 1 < M) t.off[i] = k.at(i, 1) / std::sqrt(c[i] * c[i + 1]);
  }
  return t;
}

namespace {

// Solves (T - sigma I) x = b in place; T - sigma I must be positive definite.
bool shifted_solve(const Tridiagonal& t, double sigma, std::vector<double>& b) {
  const std::size_t m = t.size();
  std::vector<double> d(m);
  std::vector<double> l(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    d[i] = t.diag[i] - sigma;
    if (i > 0) {
      l[i] = t.off[i - 1] / d[i - 1];
      d[i] -= l[i] * t.off[i - 1];
    }
    if (!(d[i] > 0.0)) return false;
  }
  for (std::size_t i = 1; i < m; ++i) b[i] -= l[i] * b[i - 1];
  for (std::size_t i = 0; i < m; ++i) b[i] /= d[i];
  for (std::size_t i = m - 1; i-- > 0;) b[i] -= l[i + 1] * b[i + 1];
  return true;
}

double rayleigh(const Tridiagonal& t, const std::vector<double>& x) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double tx = t.diag[i] * x[i];
    if (i > 0) tx += t.off[i - 1] * x[i - 1];
    if (i + 1 < x.size()) tx += t.off[i] * x[i + 1];
    num += x[i] * tx;
    den += x[i] * x[i];
  }
  return num / den;
}

void normalise(std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  s = std::sqrt(s);
  for (double& v : x) v /= s;
}

}  // namespace

Eigenpair smallest_eigenpair(const Tridiagonal& t, double tol) {
  const std::size_t m = t.size();
  if (m == 0) throw DomainError("empty operator");
  // Gershgorin interval.
  double lo = t.diag[0];
  double hi = t.diag[0];
  for (std::size_t i = 0; i < m; ++i) {
    double r = (i > 0 ? std::abs(t.off[i - 1]) : 0.0) + (i + 1 < m ? std::abs(t.off[i]) : 0.0);
    lo = std::min(lo, t.diag[i] - r);
    hi = std::max(hi, t.diag[i] + r);
  }
  // Bisection on the count of eigenvalues below x.
  const double scale = std::max(std::abs(lo), std::abs(hi));
  for (int it = 0; it < 200 && hi - lo > 1e-4 * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (t.count_below(mid) >= 1) hi = mid;
    else lo = mid;
  }
  // Back off so that T - sigma I stays positive definite.
  double sigma = lo - 1e-14 * scale;

  Eigenpair out;
  std::vector<double> x(m, 1.0);
  normalise(x);
  double mu = rayleigh(t, x);
  for (int it = 1; it <= 500; ++it) {
    if (!shifted_solve(t, sigma, x)) {
      sigma -= 1e-12 * scale;
      x.assign(m, 1.0);
      continue;
    }
    normalise(x);
    const double next = rayleigh(t, x);
    const bool done = std::abs(next - mu) <= tol * std::max(1.0, std::abs(next));
    mu = next;
    if (done) {
      out.value = mu;
      out.iterations = it;
      if (x[0] < 0.0) {
        for (double& v : x) v = -v;
      }
      out.vector = std::move(x);
      return out;
    }
  }
  throw NonConvergence("inverse iteration did not converge");
}

StabilityReport stability_eigenvalue(const RadialGrid& grid, const Nonlinearity& nl,
                                     const RadialState& state, double tol) {
  const Eigenpair pair = smallest_eigenpair(stability_operator(grid, nl, state), tol);
  StabilityReport report;
  report.lambda = state.lambda;
  report.mu_min = pair.value;
  report.iterations = pair.iterations;
  double peak = 0.0;
  for (double v : pair.vector) peak = std::max(peak, std::abs(v));
  int last = 0;
  for (double v : pair.vector) {
    if (std::abs(v) <= 1e-10 * peak) continue;
    const int s = v > 0.0 ? 1 : -1;
    if (last != 0 && s != last) ++report.eigvec_sign_changes;
    last = s;
  }
  return report;
}

}  // namespace extremal
