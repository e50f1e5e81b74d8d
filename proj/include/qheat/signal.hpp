#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qheat/grids.hpp"
#include "qheat/quadrature.hpp"

namespace qheat {

// Real signal sampled on a TimeGrid, extended by zero for t < 0.
struct CausalSignal {
  TimeGrid grid;
  std::vector<double> values;

  CausalSignal() = default;
  CausalSignal(TimeGrid g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.n)
      throw std::invalid_argument("CausalSignal: value count does not match grid");
  }

  static CausalSignal from_function(const TimeGrid& g, const auto& f) {
    std::vector<double> v(g.n);
    for (std::size_t k = 0; k < g.n; ++k) v[k] = f(g.time(k));
    return CausalSignal(g, std::move(v));
  }

  // Linear interpolation inside [0, T]; zero outside (causal extension).
  double at(double t) const {
    if (t < 0.0) return 0.0;
    const double s = t / grid.dt;
    if (s >= static_cast<double>(grid.n - 1)) return values.back();
    const auto k = static_cast<std::size_t>(s);
    const double w = s - static_cast<double>(k);
    return (1.0 - w) * values[k] + w * values[k + 1];
  }
};

struct GammaReport {
  bool is_member = false;
  double l2_norm = 0.0;
  double deriv_l2_norm = 0.0;
  double w12_norm = 0.0;
  std::optional<std::string> rejection_reason;
};

// Centered finite differences, second-order one-sided at the ends.
inline CausalSignal differentiate(const CausalSignal& sig) {
  const auto& g = sig.values;
  const std::size_t n = sig.grid.n;
  if (n < 3) throw std::invalid_argument("differentiate: need at least 3 samples");
  const double dt = sig.grid.dt;
  std::vector<double> d(n);
  d[0] = (-3.0 * g[0] + 4.0 * g[1] - g[2]) / (2.0 * dt);
  for (std::size_t k = 1; k + 1 < n; ++k) d[k] = (g[k + 1] - g[k - 1]) / (2.0 * dt);
  d[n - 1] = (3.0 * g[n - 1] - 4.0 * g[n - 2] + g[n - 3]) / (2.0 * dt);
  return CausalSignal(sig.grid, std::move(d));
}

// Membership test for the admissible boundary-input class: g continuous
// through t=0 (so |g(0)| ~ 0), square-integrable derivative, and decayed by
// the end of the finite window (trailing 5% of the samples carry at most
// tol * total energy -- the finite-horizon stand-in for L2 on the half-line).
inline GammaReport validate_gamma(const CausalSignal& sig, double tol = 1e-6) {
  sig.grid.validate();
  if (!(tol > 0.0)) throw std::invalid_argument("validate_gamma: tol must be positive");
  const auto& g = sig.values;
  const std::size_t n = sig.grid.n;
  const double dt = sig.grid.dt;

  GammaReport rep;
  double peak = 0.0;
  for (double v : g) {
    if (!std::isfinite(v)) {
      rep.rejection_reason = "signal contains non-finite samples";
      return rep;
    }
    peak = std::max(peak, std::abs(v));
  }

  rep.l2_norm = l2_norm(g, dt);
  if (n >= 3) {
    const CausalSignal d = differentiate(sig);
    rep.deriv_l2_norm = l2_norm(d.values, dt);
  }
  rep.w12_norm = rep.l2_norm + rep.deriv_l2_norm;

  if (peak == 0.0) {  // identically zero: member with all norms zero
    rep.is_member = true;
    return rep;
  }
  if (n < 3) {
    rep.rejection_reason = "too few samples to assess the derivative";
    return rep;
  }

  if (std::abs(g[0]) > tol * peak) {
    std::ostringstream os;
    os << "g(0) = " << g[0] << " breaks continuity of the zero extension at t=0";
    rep.rejection_reason = os.str();
    return rep;
  }

  const double total_energy = rep.l2_norm * rep.l2_norm;
  std::size_t tail_start = n - std::max<std::size_t>(n / 20, 2);
  double tail_energy = 0.0;
  for (std::size_t k = tail_start; k < n; ++k) tail_energy += g[k] * g[k] * dt;
  if (tail_energy > tol * total_energy) {
    std::ostringstream os;
    os << "trailing 5% of the window carries energy " << tail_energy << " > " << tol
       << " * " << total_energy << "; signal has not decayed";
    rep.rejection_reason = os.str();
    return rep;
  }

  rep.is_member = true;
  return rep;
}

// ||g||_{L2} + ||g'||_{L2} by trapezoid + centered differences.
inline double w12_norm(const CausalSignal& sig, double tol = 1e-6) {
  const GammaReport rep = validate_gamma(sig, tol);
  if (!rep.is_member)
    throw std::domain_error("w12_norm: signal is not in the admissible class: " +
                            rep.rejection_reason.value_or("unknown"));
  return rep.w12_norm;
}

// Built-in generators used by the CLI and the tests.
namespace builtin {

inline CausalSignal exp_sin(const TimeGrid& g) {
  return CausalSignal::from_function(g, [](double t) { return std::exp(-t) * std::sin(t); });
}

inline CausalSignal exp_sin_k(const TimeGrid& g, double k) {
  return CausalSignal::from_function(
      g, [k](double t) { return std::exp(-t) * std::sin(k * t); });
}

inline CausalSignal ramp_decay(const TimeGrid& g) {
  return CausalSignal::from_function(g, [](double t) { return t * std::exp(-t); });
}

// C-infinity bump supported on [1, 3].
inline CausalSignal bump(const TimeGrid& g) {
  return CausalSignal::from_function(g, [](double t) {
    const double s = (t - 2.0);
    if (std::abs(s) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s * s));
  });
}

// Gaussian-windowed tone. Its spectrum is concentrated near +-omega0 and is
// exponentially small at omega = 0, which keeps the reconstruction causal
// (see the note on the branch seam in solver.hpp).
inline CausalSignal wave_packet(const TimeGrid& g, double center = 5.0, double width = 1.0,
                                double omega0 = 6.0) {
  return CausalSignal::from_function(g, [=](double t) {
    const double s = (t - center) / width;
    return std::exp(-0.5 * s * s) * std::sin(omega0 * t);
  });
}

inline CausalSignal by_name(const std::string& name, const TimeGrid& g) {
  if (name == "exp-sin") return exp_sin(g);
  if (name == "ramp-decay") return ramp_decay(g);
  if (name == "bump") return bump(g);
  if (name == "wave-packet") return wave_packet(g);
  throw std::invalid_argument("unknown builtin signal: " + name);
}

}  // namespace builtin

}  // namespace qheat
