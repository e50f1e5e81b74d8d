#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "qheat/errors.hpp"
#include "qheat/fft.hpp"
#include "qheat/grids.hpp"
#include "qheat/signal.hpp"

namespace qheat {

using cdouble = std::complex<double>;

// Complex-valued function on a symmetric frequency grid; carrier of the
// transforms G, G0 and of the per-x solution spectra U(x, i omega).
struct Spectrum {
  FrequencyGrid grid;
  std::vector<cdouble> values;

  Spectrum() = default;
  Spectrum(FrequencyGrid g, std::vector<cdouble> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.m)
      throw std::invalid_argument("Spectrum: value count does not match grid");
  }

  // max_j |V(-i w_j) - conj(V(i w_j))|, the reality defect of the source.
  double conjugate_asymmetry() const {
    double worst = 0.0;
    const std::size_t m = grid.m;
    for (std::size_t j = 0; j < m; ++j) {
      const double d = std::abs(values[m - 1 - j] - std::conj(values[j]));
      if (d > worst) worst = d;
    }
    return worst;
  }

  double max_abs() const {
    double p = 0.0;
    for (const auto& v : values) p = std::max(p, std::abs(v));
    return p;
  }
};

namespace detail {

inline void require_transform_pair(const TimeGrid& tg, const FrequencyGrid& fg) {
  const double nyquist = std::numbers::pi / tg.dt;
  if (fg.omega_max() > nyquist * (1.0 + 1e-9)) {
    std::ostringstream os;
    os << "aliasing risk: omega_max = " << fg.omega_max() << " exceeds pi/dt = " << nyquist;
    throw config_error(os.str());
  }
  if (!fg.transform_compatible(tg))
    throw config_error(
        "incommensurate grids: need m * domega * dt = 2*pi for the discrete transform pair");
  if (fg.m < tg.n)
    throw config_error("frequency grid too small: m must be >= signal sample count");
}

}  // namespace detail

// V(i w) = (1/sqrt(2 pi)) * sum_k e^{-i w t_k} v(t_k) dt, trapezoid end
// weights, evaluated for all grid frequencies at once through the length-m
// DFT (the compatibility relation m*domega*dt = 2*pi makes the exponentials
// coincide).  With this normalization the discrete Plancherel identity
// ||V||_{L2(dw)} = ||v||_{L2(dt)} holds to rounding for signals that vanish
// at the window ends.
inline Spectrum forward_transform(const CausalSignal& sig, const FrequencyGrid& fgrid) {
  detail::require_transform_pair(sig.grid, fgrid);
  const std::size_t n = sig.grid.n, m = fgrid.m, h = fgrid.half();
  const double scale = sig.grid.dt / std::sqrt(2.0 * std::numbers::pi);

  std::vector<cdouble> buf(m, cdouble{0.0, 0.0});
  for (std::size_t k = 0; k < n; ++k) buf[k] = sig.values[k] * scale;
  buf[0] *= 0.5;
  buf[n - 1] *= 0.5;

  auto plan = fft::plan_for(m);
  fft::Workspace ws;
  std::vector<cdouble> dft(m);
  plan->forward(buf, dft, ws);

  // DFT bin l corresponds to omega = l*domega (mod the circle); reorder to
  // the symmetric layout omega_j = (j - h)*domega.
  std::vector<cdouble> out(m);
  for (std::size_t j = 0; j < m; ++j) out[j] = dft[(j + m - h) % m];
  return Spectrum(fgrid, std::move(out));
}

struct InverseResult {
  CausalSignal signal;
  double imag_residue = 0.0;  // ||Im||_2 / ||Re||_2 of the raw inverse
};

// v(t_k) = sqrt(2 pi)/dt * (1/m) sum_j e^{+i w_j t_k} V(i w_j); requires a
// conjugate-symmetric spectrum (defect <= sym_tol * max|V|), since only those
// reconstruct a real signal.
inline InverseResult inverse_transform(const Spectrum& spec, const TimeGrid& tgrid,
                                       double sym_tol = 1e-8) {
  detail::require_transform_pair(tgrid, spec.grid);
  const std::size_t m = spec.grid.m, h = spec.grid.half(), n = tgrid.n;
  const double peak = spec.max_abs();
  if (peak > 0.0 && spec.conjugate_asymmetry() > sym_tol * peak)
    throw std::domain_error(
        "inverse_transform: spectrum is not conjugate-symmetric; the reconstruction "
        "would not be a real causal signal");

  std::vector<cdouble> dft(m);
  for (std::size_t j = 0; j < m; ++j) dft[(j + m - h) % m] = spec.values[j];
  auto plan = fft::plan_for(m);
  fft::Workspace ws;
  std::vector<cdouble> time(m);
  plan->inverse(dft, time, ws);

  const double scale = std::sqrt(2.0 * std::numbers::pi) / tgrid.dt;
  std::vector<double> v(n);
  double re2 = 0.0, im2 = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    re2 += time[k].real() * time[k].real();
    im2 += time[k].imag() * time[k].imag();
    if (k < n) v[k] = time[k].real() * scale;
  }
  InverseResult res{CausalSignal(tgrid, std::move(v)),
                    re2 > 0.0 ? std::sqrt(im2 / re2) : 0.0};
  return res;
}

// (L v)(p) = (1/sqrt(2 pi)) * integral_0^inf e^{-pt} v(t) dt by direct
// trapezoid quadrature; validation tool for Re p > 0, coincides with
// forward_transform on the imaginary axis.
inline cdouble laplace_at(const CausalSignal& sig, cdouble p) {
  if (p.real() < 0.0)
    throw std::domain_error("laplace_at: Re p must be >= 0 (closed right half-plane)");
  const std::size_t n = sig.grid.n;
  const double dt = sig.grid.dt;
  cdouble acc = 0.5 * sig.values[0];  // t=0 term, e^{-p*0} = 1
  for (std::size_t k = 1; k + 1 < n; ++k)
    acc += sig.values[k] * std::exp(-p * sig.grid.time(k));
  acc += 0.5 * sig.values[n - 1] * std::exp(-p * sig.grid.time(n - 1));
  return acc * dt / std::sqrt(2.0 * std::numbers::pi);
}

}  // namespace qheat
