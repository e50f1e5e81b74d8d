#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "qheat/coefficients.hpp"
#include "qheat/errors.hpp"
#include "qheat/quadrature.hpp"
#include "qheat/signal.hpp"
#include "qheat/solver.hpp"

namespace qheat {

struct FdOracleOptions {
  double ds = 0.0;     // marching step; 0 = T/5000
  double theta = 0.5;  // implicitness (0.5 = trapezoidal)
};

namespace detail {

// Thomas sweep; dl/dd/du are the sub/main/super diagonals, b the rhs;
// solution written into b.
inline void solve_tridiagonal(std::vector<double>& dl, std::vector<double>& dd,
                              std::vector<double>& du, std::vector<double>& b) {
  const std::size_t n = dd.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double piv = dd[i - 1];
    if (std::abs(piv) < 1e-300) throw numerical_error("tridiagonal solve: zero pivot");
    const double f = dl[i] / piv;
    dd[i] -= f * du[i - 1];
    b[i] -= f * b[i - 1];
  }
  if (std::abs(dd[n - 1]) < 1e-300) throw numerical_error("tridiagonal solve: zero pivot");
  b[n - 1] /= dd[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) b[i] = (b[i] - du[i] * b[i + 1]) / dd[i];
}

}  // namespace detail

// Independent check of the terminal-snapshot claim.  The terminal-value
// problem
//   a v_t + v_xx + b v_x + c v = 0,  v(x,T) = v_*,  k0 v(0,.) + k1 v_x(0,.) = g
// is reversed with s = T - t into a well-posed forward march
//   a w_s = w_xx + b w_x + c w,  w(.,0) = v_*,  boundary data g(T-s),
// theta-scheme on [0, X] with the far-field condition w(X) = 0.  The returned
// profile is w(., T) = v(., 0); it is small exactly when v_* is the terminal
// snapshot matching the boundary input g.
inline Profile fd_forward_oracle(const Profile& v_star, const CausalSignal& g,
                                 const CoefficientSet& cs, double T,
                                 const FdOracleOptions& opts = {}) {
  if (check_admissible(cs).kind != AdmissibilityKind::Strict)
    throw std::domain_error("fd_forward_oracle: requires strictly admissible coefficients");
  if (!(T > 0.0)) throw std::invalid_argument("fd_forward_oracle: T must be positive");
  const std::size_t nx = v_star.xgrid.nx;
  const double dx = v_star.xgrid.dx;
  if (v_star.values.size() != nx)
    throw std::invalid_argument("fd_forward_oracle: profile size mismatch");

  const double ds = opts.ds > 0.0 ? opts.ds : T / 5000.0;
  const auto nsteps = static_cast<std::size_t>(std::llround(T / ds));
  if (nsteps == 0 || std::abs(static_cast<double>(nsteps) * ds - T) > 1e-9 * T)
    throw std::invalid_argument("fd_forward_oracle: ds must divide T");
  const double th = opts.theta;
  const bool dirichlet = (cs.k1 == 0.0);

  // Interior operator (A w)_i = [w_xx + b w_x + c w]_i / a.
  const double lo = (1.0 / (dx * dx) - cs.b / (2.0 * dx)) / cs.a;
  const double di = (-2.0 / (dx * dx) + cs.c) / cs.a;
  const double hi = (1.0 / (dx * dx) + cs.b / (2.0 * dx)) / cs.a;

  // Robin row at i=0 after ghost elimination: with
  //   k0 w_0 + k1 (w_1 - w_ghost)/(2 dx) = q
  // the operator row becomes (c00 w_0 + c01 w_1 + cq q)/a.
  const double c01 = 2.0 / (dx * dx);
  const double c00 = dirichlet ? 0.0
                               : -2.0 / (dx * dx) + 2.0 * cs.k0 / (cs.k1 * dx) -
                                     cs.b * cs.k0 / cs.k1 + cs.c;
  const double cq = dirichlet ? 0.0 : cs.b / cs.k1 - 2.0 / (cs.k1 * dx);

  double guard_base = l2_norm(v_star.values, dx);
  for (double v : g.values) guard_base = std::max(guard_base, std::abs(v));
  guard_base = std::max(guard_base, 1e-12);

  std::vector<double> w = v_star.values;
  w.back() = 0.0;
  if (dirichlet) w[0] = g.at(T) / cs.k0;  // boundary and initial data meet at s=0

  // Unknowns: rows 1..nx-2 for Dirichlet, rows 0..nx-2 for Robin.
  const std::size_t first = dirichlet ? 1 : 0;
  const std::size_t nu = nx - 1 - first;
  std::vector<double> dl(nu), dd(nu), du(nu), rhs(nu);

  for (std::size_t step = 0; step < nsteps; ++step) {
    const double s0 = static_cast<double>(step) * ds;
    const double s1 = s0 + ds;
    const double q0 = g.at(T - s0), q1 = g.at(T - s1);

    for (std::size_t r = 0; r < nu; ++r) {
      const std::size_t i = first + r;
      if (!dirichlet && i == 0) {
        rhs[r] = w[0] + (1.0 - th) * ds * (c00 * w[0] + c01 * w[1] + cq * q0) / cs.a +
                 th * ds * cq * q1 / cs.a;
        dl[r] = 0.0;
        dd[r] = 1.0 - th * ds * c00 / cs.a;
        du[r] = -th * ds * c01 / cs.a;
        continue;
      }
      const double wl = w[i - 1];
      const double wr = w[i + 1];
      rhs[r] = w[i] + (1.0 - th) * ds * (lo * wl + di * w[i] + hi * wr);
      dl[r] = -th * ds * lo;
      dd[r] = 1.0 - th * ds * di;
      du[r] = -th * ds * hi;
      if (dirichlet && i == 1) {
        // old-level boundary already sits in w[0]; new-level term to the rhs
        rhs[r] += th * ds * lo * (q1 / cs.k0);
        dl[r] = 0.0;
      }
    }
    detail::solve_tridiagonal(dl, dd, du, rhs);
    for (std::size_t r = 0; r < nu; ++r) w[first + r] = rhs[r];
    if (dirichlet) w[0] = q1 / cs.k0;
    w[nx - 1] = 0.0;

    const double bound = 10.0 * std::exp(std::abs(cs.c) * s1 / cs.a) * guard_base;
    if (l2_norm(w, dx) > bound)
      throw numerical_error("fd_forward_oracle: marching instability detected");
  }

  return Profile{v_star.xgrid, std::move(w)};
}

}  // namespace qheat
