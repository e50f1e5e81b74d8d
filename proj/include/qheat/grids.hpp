#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qheat/errors.hpp"

namespace qheat {

// Uniform samples t_k = k*dt, k = 0..n-1.  Everything before t=0 is
// implicitly zero (causal convention shared by all signal carriers).
struct TimeGrid {
  double dt = 0.0;
  std::size_t n = 0;

  TimeGrid() = default;
  TimeGrid(double dt_, std::size_t n_) : dt(dt_), n(n_) { validate(); }

  void validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt))
      throw std::invalid_argument("TimeGrid: dt must be positive and finite");
    if (n < 2) throw std::invalid_argument("TimeGrid: need at least 2 samples");
  }

  double time(std::size_t k) const { return static_cast<double>(k) * dt; }
  double duration() const { return static_cast<double>(n - 1) * dt; }

  bool operator==(const TimeGrid&) const = default;
};

// Uniform x_i = i*dx, i = 0..nx-1, starting at the boundary x=0.
struct SpaceGrid {
  double dx = 0.0;
  std::size_t nx = 0;

  SpaceGrid() = default;
  SpaceGrid(double dx_, std::size_t nx_) : dx(dx_), nx(nx_) { validate(); }

  void validate() const {
    if (!(dx > 0.0) || !std::isfinite(dx))
      throw std::invalid_argument("SpaceGrid: dx must be positive and finite");
    if (nx < 3) throw std::invalid_argument("SpaceGrid: need at least 3 samples");
  }

  double pos(std::size_t i) const { return static_cast<double>(i) * dx; }
  double extent() const { return static_cast<double>(nx - 1) * dx; }

  bool operator==(const SpaceGrid&) const = default;
};

// Symmetric frequency grid omega_j = (j - (m-1)/2) * domega, j = 0..m-1.
// m is odd so that omega=0 is a sample and every +omega has its -omega twin.
struct FrequencyGrid {
  double domega = 0.0;
  std::size_t m = 0;

  FrequencyGrid() = default;
  FrequencyGrid(double domega_, std::size_t m_) : domega(domega_), m(m_) { validate(); }

  void validate() const {
    if (!(domega > 0.0) || !std::isfinite(domega))
      throw std::invalid_argument("FrequencyGrid: domega must be positive and finite");
    if (m < 3 || m % 2 == 0)
      throw std::invalid_argument("FrequencyGrid: sample count must be odd and >= 3");
  }

  std::size_t half() const { return (m - 1) / 2; }
  double omega(std::size_t j) const {
    return (static_cast<double>(j) - static_cast<double>(half())) * domega;
  }
  double omega_max() const { return static_cast<double>(half()) * domega; }

  // Grid usable with the discrete transforms of `spectral.hpp` against a
  // time grid of step dt: the m frequencies must tile [-pi/dt, pi/dt],
  // i.e. m * domega * dt = 2*pi.
  bool transform_compatible(const TimeGrid& tg, double rel_tol = 1e-9) const {
    const double prod = static_cast<double>(m) * domega * tg.dt;
    return std::abs(prod - 2.0 * std::numbers::pi) <= rel_tol * 2.0 * std::numbers::pi;
  }

  // Smallest compatible grid holding a signal on `tg`; min_m can ask for
  // extra padding (finer domega).
  static FrequencyGrid for_time_grid(const TimeGrid& tg, std::size_t min_m = 0) {
    std::size_t m = tg.n > min_m ? tg.n : min_m;
    if (m < 3) m = 3;
    if (m % 2 == 0) ++m;
    return FrequencyGrid(2.0 * std::numbers::pi / (static_cast<double>(m) * tg.dt), m);
  }

  bool operator==(const FrequencyGrid&) const = default;
};

}  // namespace qheat
