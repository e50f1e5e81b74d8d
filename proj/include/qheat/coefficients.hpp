#pragma once

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

namespace qheat {

// Constant coefficients of  a u_t + u_xx + b u_x + c u = 0  with the Robin
// boundary weights (k0, k1).  mu = b^2/4 - c is the discriminant offset of
// the characteristic quadratic; mu < 0 is the strict admissibility regime.
struct CoefficientSet {
  double a = 1.0;
  double b = 1.0;
  double c = 1.0;
  double k0 = 1.0;
  double k1 = 0.0;

  double mu() const { return 0.25 * b * b - c; }
  bool strict() const { return mu() < 0.0; }
};

enum class AdmissibilityKind { Strict, NeedsShift, Rejected };

struct Admissibility {
  AdmissibilityKind kind = AdmissibilityKind::Rejected;
  // Smallest exponential shift that restores strictness: any M > min_shift
  // works (c -> c + a*M in the shifted problem).
  double min_shift = 0.0;
  std::string reason;
};

inline Admissibility check_admissible(const CoefficientSet& cs) {
  Admissibility v;
  if (!(cs.a > 0.0)) {
    v.reason = "a must be positive";
    return v;
  }
  if (!(cs.b > 0.0)) {
    v.reason = "b must be positive";
    return v;
  }
  if (cs.k0 == 0.0 && cs.k1 == 0.0) {
    v.reason = "k0, k1 must not both vanish";
    return v;
  }
  if (cs.k0 * cs.k1 > 0.0) {
    v.reason = "k0*k1 > 0 is outside the admissible boundary-weight cone";
    return v;
  }
  if (cs.strict()) {
    v.kind = AdmissibilityKind::Strict;
    return v;
  }
  v.kind = AdmissibilityKind::NeedsShift;
  v.min_shift = cs.mu() / cs.a;
  std::ostringstream os;
  os << "b^2/4 = " << 0.25 * cs.b * cs.b << " >= c = " << cs.c << "; shift by M > "
     << v.min_shift;
  v.reason = os.str();
  return v;
}

}  // namespace qheat
