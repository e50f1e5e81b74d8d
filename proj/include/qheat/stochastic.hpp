#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qheat/coefficients.hpp"
#include "qheat/errors.hpp"
#include "qheat/parallel.hpp"
#include "qheat/quadrature.hpp"
#include "qheat/rng.hpp"
#include "qheat/signal.hpp"
#include "qheat/solver.hpp"
#include "qheat/stats.hpp"

namespace qheat {

// Initial law of the starting point: a point mass or a tabulated density on a
// uniform grid (trapezoid mixing, inverse-CDF sampling).
class InitialLaw {
 public:
  static InitialLaw point(double a0) {
    if (!(a0 >= 0.0)) throw std::invalid_argument("InitialLaw: point mass must be >= 0");
    InitialLaw law;
    law.point_ = true;
    law.a0_ = a0;
    return law;
  }

  static InitialLaw tabulated(std::vector<double> xs, std::vector<double> dens) {
    if (xs.size() != dens.size() || xs.size() < 2)
      throw std::invalid_argument("InitialLaw: need matching grids with >= 2 nodes");
    const double dx = xs[1] - xs[0];
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
      if (std::abs(xs[i + 1] - xs[i] - dx) > 1e-9 * std::max(1.0, dx))
        throw std::invalid_argument("InitialLaw: density grid must be uniform");
    if (xs.front() < 0.0)
      throw std::invalid_argument("InitialLaw: support must lie in x >= 0");
    for (double d : dens)
      if (!(d >= 0.0)) throw std::invalid_argument("InitialLaw: density must be >= 0");
    InitialLaw law;
    law.xs_ = std::move(xs);
    law.dens_ = std::move(dens);
    const double mass = trapezoid(law.dens_, dx);
    if (!(mass > 0.0)) throw std::invalid_argument("InitialLaw: density has zero mass");
    for (double& d : law.dens_) d /= mass;
    // piecewise-linear CDF at the nodes
    law.cdf_.resize(law.xs_.size());
    law.cdf_[0] = 0.0;
    for (std::size_t i = 1; i < law.xs_.size(); ++i)
      law.cdf_[i] = law.cdf_[i - 1] + 0.5 * (law.dens_[i - 1] + law.dens_[i]) * dx;
    law.cdf_.back() = 1.0;
    return law;
  }

  bool is_point() const { return point_; }
  double point_mass() const { return a0_; }

  double sample(Rng& rng) const {
    if (point_) return a0_;
    const double u = rng.uniform();
    auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.begin()) return xs_.front();
    if (it == cdf_.end()) return xs_.back();
    const std::size_t i = static_cast<std::size_t>(it - cdf_.begin());
    const double c0 = cdf_[i - 1], c1 = cdf_[i];
    const double w = c1 > c0 ? (u - c0) / (c1 - c0) : 0.0;
    return xs_[i - 1] + w * (xs_[i] - xs_[i - 1]);
  }

  // sum_i w_i f(x_i) approximating E_rho[f]
  template <typename F>
  double expectation(F&& f) const {
    if (point_) return f(a0_);
    const double dx = xs_[1] - xs_[0];
    double acc = 0.0;
    for (std::size_t i = 0; i < xs_.size(); ++i) {
      const double w = (i == 0 || i + 1 == xs_.size()) ? 0.5 : 1.0;
      acc += w * dens_[i] * f(xs_[i]);
    }
    return acc * dx;
  }

 private:
  bool point_ = false;
  double a0_ = 0.0;
  std::vector<double> xs_, dens_, cdf_;
};

// Drifted Brownian motion y(t) = a0 + beta t + sigma w(t), absorbed at 0,
// inflated inside the domain at constant rate kappa, on the horizon [0, T].
struct ProcessParams {
  double beta = 1.0;
  double sigma = 1.0;
  double kappa = 0.0;
  double T = 1.0;
  InitialLaw rho = InitialLaw::point(1.0);

  void validate() const {
    if (!(sigma > 0.0)) throw std::invalid_argument("ProcessParams: sigma must be > 0");
    if (!(T > 0.0)) throw std::invalid_argument("ProcessParams: T must be > 0");
  }

  // Generator matching against a u_t + u_xx + b u_x + c u = 0 (divide by a):
  // drift b/a, sigma^2/2 = 1/a, killing rate c/a.  Only the Dirichlet trace
  // (k0=1, k1=0) couples to the first-passage functional.
  static ProcessParams from_coefficients(const CoefficientSet& cs, double T, InitialLaw rho) {
    if (cs.k0 != 1.0 || cs.k1 != 0.0)
      throw std::invalid_argument(
          "ProcessParams: unsupported configuration, duality mapping requires k0=1, k1=0");
    if (!(cs.a > 0.0)) throw std::invalid_argument("ProcessParams: a must be > 0");
    ProcessParams p;
    p.beta = cs.b / cs.a;
    p.sigma = std::sqrt(2.0 / cs.a);
    p.kappa = cs.c / cs.a;
    p.T = T;
    p.rho = std::move(rho);
    p.validate();
    return p;
  }
};

struct PathSample {
  double tau = std::numeric_limits<double>::infinity();  // inf = survived to T
  double y_T = 0.0;                                      // terminal position if survived
  bool absorbed() const { return std::isfinite(tau); }
};

struct SamplingOptions {
  double h = 0.0;        // Euler step; 0 = T/4096
  unsigned threads = 0;  // 0 = hardware concurrency
};

namespace detail {

// Inverse-Gaussian draw IG(mu, lambda) (Michael-Schucany-Haas).
inline double inverse_gaussian(Rng& rng, double mu, double lambda) {
  const double z = rng.normal();
  const double y = z * z;
  const double x =
      mu + mu * mu * y / (2.0 * lambda) -
      mu / (2.0 * lambda) * std::sqrt(4.0 * mu * lambda * y + mu * mu * y * y);
  if (rng.uniform() <= mu / (mu + x)) return x;
  return mu * mu / x;
}

// First time a Brownian bridge from a>0 (at offset 0) to b (at offset delta)
// hits 0, given that it hits.  With w ~ IG(a/|b|, a^2/(sigma^2 delta)) the
// hitting offset is delta * w / (1 + w); for b = 0 the hit is at the
// endpoint.
inline double bridge_hit_offset(Rng& rng, double a, double b, double delta, double sigma) {
  const double ab = std::abs(b);
  if (ab < 1e-300 * std::max(a, 1.0)) return delta;
  const double w = inverse_gaussian(rng, a / ab, a * a / (sigma * sigma * delta));
  return delta * w / (1.0 + w);
}

}  // namespace detail

// Euler walk with exact Gaussian increments; between grid points the
// Brownian-bridge crossing probability exp(-2 y0 y1/(sigma^2 h)) decides
// absorption, and the crossing instant inside an absorbed step is drawn from
// its exact conditional law.  Deterministic for fixed (seed, n_paths): paths
// are striped into fixed-size blocks, block i drawing from stream (seed, i).
inline std::vector<PathSample> sample_first_passage(const ProcessParams& params,
                                                    std::uint64_t seed, std::size_t n_paths,
                                                    const SamplingOptions& opts = {}) {
  params.validate();
  if (n_paths == 0) throw std::invalid_argument("sample_first_passage: n_paths must be >= 1");
  const double h = opts.h > 0.0 ? opts.h : params.T / 4096.0;
  const auto nsteps = static_cast<std::size_t>(std::llround(params.T / h));
  if (nsteps == 0 || std::abs(static_cast<double>(nsteps) * h - params.T) > 1e-9 * params.T)
    throw std::invalid_argument("sample_first_passage: h must divide T");

  const double sig = params.sigma;
  const double sqh = sig * std::sqrt(h);
  const double s2h = sig * sig * h;
  // exp(-2 y0 y1 / s2h) below this threshold can never fire at double
  // precision, so the uniform is not drawn at all
  const double guard = 0.5 * s2h * 745.0;

  std::vector<PathSample> out(n_paths);
  constexpr std::size_t kBlock = 16384;

  parallel_chunks(n_paths, opts.threads, kBlock,
                  [&](std::size_t block, std::size_t p0, std::size_t p1) {
                    Rng rng(seed, block);
                    for (std::size_t p = p0; p < p1; ++p) {
                      double y = params.rho.sample(rng);
                      PathSample s;
                      if (y <= 0.0) {
                        s.tau = 0.0;  // started on the boundary
                        out[p] = s;
                        continue;
                      }
                      for (std::size_t k = 0; k < nsteps; ++k) {
                        const double yn = y + params.beta * h + sqh * rng.normal();
                        if (yn <= 0.0) {
                          s.tau = static_cast<double>(k) * h +
                                  detail::bridge_hit_offset(rng, y, yn, h, sig);
                          break;
                        }
                        if (y * yn < guard &&
                            rng.uniform() < std::exp(-2.0 * y * yn / s2h)) {
                          s.tau = static_cast<double>(k) * h +
                                  detail::bridge_hit_offset(rng, y, yn, h, sig);
                          break;
                        }
                        y = yn;
                      }
                      if (!s.absorbed()) s.y_T = y;
                      out[p] = s;
                    }
                  });
  return out;
}

// Density of the first-passage time to 0 from a0 > 0 (drift beta away from
// the boundary): f(t) = a0/(sigma sqrt(2 pi t^3)) exp(-(a0+beta t)^2/(2 sigma^2 t)).
// Defective: its total mass is exp(-2 a0 beta / sigma^2).
inline double fpt_density(double a0, const ProcessParams& params, double t) {
  if (!(a0 > 0.0)) throw std::invalid_argument("fpt_density: a0 must be > 0");
  if (!(t > 0.0)) throw std::domain_error("fpt_density: t must be > 0");
  const double s = params.sigma;
  const double num = a0 + params.beta * t;
  return a0 / (s * std::sqrt(2.0 * std::numbers::pi * t * t * t)) *
         std::exp(-num * num / (2.0 * s * s * t));
}

namespace detail {

// Absorbed transition density (method of images with drift):
// q(x,T|a0) = phi_{s^2 T}(x - a0 - beta T) - e^{-2 a0 beta/s^2} phi_{s^2 T}(x + a0 - beta T).
inline double absorbed_transition(double x, double T, double a0, double beta, double sigma) {
  const double v = sigma * sigma * T;
  auto phi = [v](double z) {
    return std::exp(-z * z / (2.0 * v)) / std::sqrt(2.0 * std::numbers::pi * v);
  };
  if (a0 <= 0.0) return 0.0;
  return phi(x - a0 - beta * T) -
         std::exp(-2.0 * a0 * beta / (sigma * sigma)) * phi(x + a0 - beta * T);
}

}  // namespace detail

// p(x,T) = e^{kappa T} * integral rho(a0) q(x,T|a0) da0; the inflated density
// of the absorbed process, vanishing at x = 0.
inline double killed_density(const ProcessParams& params, double x, double T) {
  if (!(x >= 0.0)) throw std::invalid_argument("killed_density: x must be >= 0");
  if (!(T > 0.0)) throw std::domain_error("killed_density: T must be > 0");
  const double q = params.rho.expectation([&](double a0) {
    return detail::absorbed_transition(x, T, a0, params.beta, params.sigma);
  });
  return std::exp(params.kappa * T) * q;
}

struct DualityReport {
  double lhs_mc = 0.0;
  double lhs_stderr = 0.0;
  double lhs_quadrature = 0.0;
  double rhs = 0.0;
  double z_score = 0.0;
};

struct DualityOptions {
  SpaceGrid xgrid{0.02, 1251};       // solve grid; must cover the killed density mass
  FrequencyGrid fgrid{};             // default: matched to the signal grid
  double h = 0.0;                    // Euler step; 0 = T/4096
  unsigned threads = 0;
  SolveOptions solve_opts{};
};

// Reconstruction identity: with u_g the solve output and Psi = u_g(., T),
//   E e^{kappa tau} g(tau) 1{tau<T}  =  - integral p(x,T) Psi(x) dx,
// checked three ways: bridge-corrected Monte Carlo (lhs_mc +- stderr),
// time quadrature against the closed-form first-passage density
// (lhs_quadrature), and the right-hand side from the solved field (rhs).
inline DualityReport duality_check(const CausalSignal& g, const CoefficientSet& cs,
                                   const InitialLaw& rho, double T, std::uint64_t seed,
                                   std::size_t n_paths, const DualityOptions& opts = {}) {
  const Admissibility adm = check_admissible(cs);
  if (adm.kind != AdmissibilityKind::Strict)
    throw std::domain_error("duality_check: requires strictly admissible coefficients");
  ProcessParams params = ProcessParams::from_coefficients(cs, T, rho);

  // (a) solve and snapshot
  FrequencyGrid fgrid = opts.fgrid.m >= 3 ? opts.fgrid : FrequencyGrid::for_time_grid(g.grid);
  SolveOptions sopts = opts.solve_opts;
  sopts.threads = opts.threads;
  sopts.skip_report = true;
  const SolveResult solved = solve(g, cs, opts.xgrid, fgrid, sopts);
  const Profile psi = terminal_snapshot(solved.field, T);

  DualityReport rep;

  // (c) rhs = - integral p(x,T) Psi(x) dx on the solve grid
  {
    std::vector<double> integrand(psi.values.size());
    for (std::size_t i = 0; i < integrand.size(); ++i)
      integrand[i] = killed_density(params, psi.xgrid.pos(i), T) * psi.values[i];
    rep.rhs = -trapezoid(integrand, psi.xgrid.dx);
  }

  // lhs by quadrature: integral_0^T e^{kappa t} g(t) f(t|a0) dt mixed over rho
  {
    const double dt = g.grid.dt;
    const auto kT = static_cast<std::size_t>(std::llround(T / dt));
    if (std::abs(static_cast<double>(kT) * dt - T) > 1e-9 * std::max(1.0, T) ||
        kT >= g.grid.n)
      throw std::invalid_argument("duality_check: T must be a grid time inside the signal");
    rep.lhs_quadrature = params.rho.expectation([&](double a0) {
      if (a0 <= 0.0) return 0.0;
      std::vector<double> f(kT + 1, 0.0);
      for (std::size_t k = 1; k <= kT; ++k) {
        const double t = g.grid.time(k);
        f[k] = std::exp(params.kappa * t) * g.values[k] * fpt_density(a0, params, t);
      }
      return trapezoid(f, dt);
    });
  }

  // lhs by Monte Carlo
  {
    SamplingOptions sampling;
    sampling.h = opts.h;
    sampling.threads = opts.threads;
    const std::vector<PathSample> paths = sample_first_passage(params, seed, n_paths, sampling);
    double sum = 0.0, sumsq = 0.0;
    for (const PathSample& s : paths) {
      double v = 0.0;
      if (s.absorbed() && s.tau < T)
        v = std::exp(params.kappa * s.tau) * g.at(s.tau);
      sum += v;
      sumsq += v * v;
    }
    const double n = static_cast<double>(n_paths);
    rep.lhs_mc = sum / n;
    const double var = std::max(0.0, (sumsq - sum * sum / n) / (n - 1.0));
    rep.lhs_stderr = std::sqrt(var / n);
  }

  rep.z_score = rep.lhs_stderr > 0.0 ? std::abs(rep.lhs_mc - rep.rhs) / rep.lhs_stderr
                                     : std::numeric_limits<double>::infinity();
  if (rep.lhs_stderr == 0.0 && rep.lhs_mc == rep.rhs) rep.z_score = 0.0;
  return rep;
}

}  // namespace qheat
