#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "qheat/errors.hpp"

namespace qheat {

// Regularized upper incomplete gamma Q(s, x) = Gamma(s,x)/Gamma(s),
// series for x < s+1, Lentz continued fraction otherwise.
inline double gamma_q(double s, double x) {
  if (!(s > 0.0) || x < 0.0) throw std::invalid_argument("gamma_q: need s > 0, x >= 0");
  if (x == 0.0) return 1.0;
  const double lg = std::lgamma(s);
  if (x < s + 1.0) {
    double term = 1.0 / s, sum = term;
    for (int k = 1; k < 10000; ++k) {
      term *= x / (s + k);
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    const double p = sum * std::exp(-x + s * std::log(x) - lg);
    return 1.0 - p;
  }
  double b = x + 1.0 - s, c = 1e308, d = 1.0 / b, h = d;
  for (int k = 1; k < 10000; ++k) {
    const double an = -static_cast<double>(k) * (static_cast<double>(k) - s);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::abs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + s * std::log(x) - lg);
}

inline double chi2_pvalue(double chi2, std::size_t dof) {
  return gamma_q(0.5 * static_cast<double>(dof), 0.5 * chi2);
}

struct Histogram {
  double lo = 0.0, hi = 1.0;
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;

  Histogram(double lo_, double hi_, std::size_t nbins) : lo(lo_), hi(hi_), counts(nbins, 0) {
    if (!(hi > lo) || nbins == 0) throw std::invalid_argument("Histogram: bad range");
  }
  void add(double x) {
    ++total;
    if (x < lo || x >= hi) return;
    const auto i = static_cast<std::size_t>((x - lo) / (hi - lo) *
                                            static_cast<double>(counts.size()));
    if (i < counts.size()) ++counts[i];
  }
  double bin_left(std::size_t i) const {
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(counts.size());
  }
  double bin_right(std::size_t i) const { return bin_left(i + 1); }
};

struct Chi2Result {
  double chi2 = 0.0;
  std::size_t dof = 0;
  double p_value = 0.0;
};

// Pearson chi-square of observed counts against a fully specified density:
// expected_i = n_scale * integral of density over bin i (composite Simpson).
// dof = bins - 1.
inline Chi2Result chi2_against_density(const Histogram& h,
                                       const std::function<double(double)>& density,
                                       double n_scale) {
  const std::size_t nb = h.counts.size();
  double chi2 = 0.0;
  for (std::size_t i = 0; i < nb; ++i) {
    const double a = h.bin_left(i), b = h.bin_right(i);
    constexpr int pieces = 32;  // composite Simpson inside the bin
    const double step = (b - a) / (2 * pieces);
    double s = density(a) + density(b);
    for (int j = 1; j < 2 * pieces; ++j) s += density(a + step * j) * (j % 2 ? 4.0 : 2.0);
    const double expected = n_scale * s * step / 3.0;
    if (expected < 1e-9)
      throw numerical_error("chi2_against_density: expected count vanishes in a bin");
    const double d = static_cast<double>(h.counts[i]) - expected;
    chi2 += d * d / expected;
  }
  return Chi2Result{chi2, nb - 1, chi2_pvalue(chi2, nb - 1)};
}

struct MeanStderr {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

inline MeanStderr mean_stderr(const std::vector<double>& xs) {
  MeanStderr r;
  r.n = xs.size();
  if (r.n == 0) return r;
  double s = 0.0;
  for (double x : xs) s += x;
  r.mean = s / static_cast<double>(r.n);
  if (r.n < 2) return r;
  double q = 0.0;
  for (double x : xs) q += (x - r.mean) * (x - r.mean);
  r.std_error = std::sqrt(q / (static_cast<double>(r.n - 1) * static_cast<double>(r.n)));
  return r;
}

}  // namespace qheat
