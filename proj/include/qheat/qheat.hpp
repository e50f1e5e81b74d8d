#pragma once

// Frequency-domain solver for the inverse boundary-value problem of the
// constant-coefficient parabolic equation on the quarter-plane, with the
// first-passage-time duality of the killed drifted Brownian motion.

#include "qheat/coefficients.hpp"
#include "qheat/config.hpp"
#include "qheat/csv.hpp"
#include "qheat/errors.hpp"
#include "qheat/fd_oracle.hpp"
#include "qheat/fft.hpp"
#include "qheat/grids.hpp"
#include "qheat/quadrature.hpp"
#include "qheat/roots.hpp"
#include "qheat/signal.hpp"
#include "qheat/solver.hpp"
#include "qheat/spectral.hpp"
#include "qheat/stats.hpp"
#include "qheat/stochastic.hpp"
