#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "qheat/coefficients.hpp"
#include "qheat/errors.hpp"
#include "qheat/grids.hpp"

namespace qheat {

using cdouble = std::complex<double>;

// Roots of lambda^2 + b lambda + (c + a p) = 0:
//   lambda_1 = -b/2 - sqrt(mu - a p),  lambda_2 = -b/2 + sqrt(mu - a p),
// with the principal square root (Re >= 0, cut on the negative real axis).
// lambda_1 is the mode with Re <= -b/2, uniformly decaying in x.
struct RootPair {
  cdouble p;
  cdouble lambda1;
  cdouble lambda2;
};

namespace detail {

// Principal sqrt resolving the cut by the omega -> 0+ limit: arguments on the
// negative real axis map to -i sqrt|z| (the limit from Im z < 0, which is how
// mu - i a omega approaches the axis as omega -> 0+).
inline cdouble branch_sqrt(cdouble z) {
  if (z.imag() == 0.0 && z.real() < 0.0) return {0.0, -std::sqrt(-z.real())};
  return std::sqrt(z);
}

}  // namespace detail

inline RootPair roots_at(const CoefficientSet& cs, cdouble p) {
  if (p.real() < 0.0)
    throw std::domain_error("roots_at: Re p must be >= 0");
  const cdouble s = detail::branch_sqrt(cdouble{cs.mu(), 0.0} - cs.a * p);
  return RootPair{p, -0.5 * cs.b - s, -0.5 * cs.b + s};
}

// Suprema over the sampled imaginary axis of the moduli appearing in the
// frequency-domain estimates.  The last term carries the weight
// (1+|w|)^{-1/2} when k1 = 0: lambda_1/k0 itself grows like sqrt(a|w|), so
// only the weighted supremum is finite (the admissible inputs supply the
// missing power of w).  For k1 != 0 the unweighted supremum is reported.
struct HardyBounds {
  double inv_diff = 0.0;           // sup |1/(l1 - l2)|
  double l1_over_diff = 0.0;       // sup |l1/(l1 - l2)|
  double l2_over_diff = 0.0;       // sup |l2/(l1 - l2)|
  double inv_k = 0.0;              // sup |1/(k0 + k1 l1)|
  double l1_over_k_weighted = 0.0; // sup |l1/(k0 + k1 l1)| (weighted iff k1 = 0)
  double n_total = 0.0;
};

inline HardyBounds hardy_bounds(const CoefficientSet& cs, const FrequencyGrid& fgrid) {
  const auto adm = check_admissible(cs);
  if (adm.kind != AdmissibilityKind::Strict)
    throw std::domain_error("hardy_bounds: requires strictly admissible coefficients: " +
                            adm.reason);
  HardyBounds hb;
  const bool weighted = (cs.k1 == 0.0);
  for (std::size_t j = 0; j < fgrid.m; ++j) {
    const double w = fgrid.omega(j);
    const RootPair r = roots_at(cs, cdouble{0.0, w});
    const cdouble diff = r.lambda1 - r.lambda2;
    const double adiff = std::abs(diff);
    const cdouble denom = cs.k0 + cs.k1 * r.lambda1;
    if (std::abs(denom) < 1e-14)
      throw numerical_error("hardy_bounds: k0 + k1*lambda1 degenerates on the grid");
    hb.inv_diff = std::max(hb.inv_diff, 1.0 / adiff);
    hb.l1_over_diff = std::max(hb.l1_over_diff, std::abs(r.lambda1) / adiff);
    hb.l2_over_diff = std::max(hb.l2_over_diff, std::abs(r.lambda2) / adiff);
    hb.inv_k = std::max(hb.inv_k, 1.0 / std::abs(denom));
    double last = std::abs(r.lambda1) / std::abs(denom);
    if (weighted) last /= std::sqrt(1.0 + std::abs(w));
    hb.l1_over_k_weighted = std::max(hb.l1_over_k_weighted, last);
  }
  hb.n_total =
      hb.inv_diff + hb.l1_over_diff + hb.l2_over_diff + hb.inv_k + hb.l1_over_k_weighted;
  return hb;
}

}  // namespace qheat
