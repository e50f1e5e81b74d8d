#pragma once

#include <stdexcept>
#include <string>

namespace qheat {

// Grid/transform wiring that cannot produce a meaningful result
// (incommensurate grids, aliasing risk, unreadable run configuration).
struct config_error : std::runtime_error {
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// A computation left the regime where the algorithm is trustworthy
// (near-zero pivots, unstable marching, degenerate denominators).
struct numerical_error : std::runtime_error {
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qheat
