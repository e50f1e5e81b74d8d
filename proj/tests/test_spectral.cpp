#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

#include "qheat/spectral.hpp"
#include "support/oracles.hpp"

using namespace qheat;

namespace {
double spectrum_l2(const Spectrum& s) {
  double acc = 0.0;
  for (const auto& v : s.values) acc += std::norm(v);
  return std::sqrt(acc * s.grid.domega);
}
double signal_l2(const CausalSignal& s) { return l2_norm(s.values, s.grid.dt); }
}  // namespace

TEST_CASE("forward transform agrees with the direct quadrature sum", "[spectral]") {
  const TimeGrid tg(1e-2, 513);
  const auto g = builtin::exp_sin(tg);
  const auto fg = FrequencyGrid::for_time_grid(tg);
  const Spectrum G = forward_transform(g, fg);
  for (std::size_t j = 0; j < fg.m; j += 41) {
    const cdouble ref = oracles::direct_transform(g, fg.omega(j));
    CHECK(std::abs(G.values[j] - ref) < 1e-12);
  }
}

TEST_CASE("one-sided exponential matches its analytic transform", "[spectral]") {
  // v = e^{-t}: V(iw) = 1/(sqrt(2 pi)(1 + iw)).  Trapezoid quadrature error
  // grows like |1+iw|^2 dt^2/12, so the check is pointwise-relative in the
  // band |w| <= 100 at dt = 1e-4 where that error stays near 1e-5.
  const double dt = 1e-4;
  const std::size_t n = 400001;  // T = 40
  const TimeGrid tg(dt, n);
  const auto v = CausalSignal::from_function(tg, [](double t) { return std::exp(-t); });
  const auto fg = FrequencyGrid::for_time_grid(tg);
  const Spectrum V = forward_transform(v, fg);
  double worst_rel = 0.0;
  for (std::size_t j = 0; j < fg.m; ++j) {
    const double w = fg.omega(j);
    if (std::abs(w) > 100.0) continue;
    const cdouble ref = oracles::one_sided_exp_transform(w);
    worst_rel = std::max(worst_rel, std::abs(V.values[j] - ref) / std::abs(ref));
  }
  // quadrature bound at w=100: (1+w^2) dt^2/12 ~ 8.3e-6
  CHECK(worst_rel < 1e-5);

  SECTION("zero signal transforms to zero") {
    const CausalSignal z(tg, std::vector<double>(tg.n, 0.0));
    const Spectrum Z = forward_transform(z, fg);
    CHECK(Z.max_abs() == 0.0);
  }
}

TEST_CASE("Plancherel on exp-sin and linearity", "[spectral]") {
  const TimeGrid tg(1e-3, 20001);
  const auto g = builtin::exp_sin(tg);
  const auto fg = FrequencyGrid::for_time_grid(tg);
  const Spectrum G = forward_transform(g, fg);
  // ||V||^2 = ||v||^2 = 1/8 up to window truncation
  CHECK(spectrum_l2(G) * spectrum_l2(G) == Catch::Approx(0.125).epsilon(1e-6));
  CHECK(spectrum_l2(G) == Catch::Approx(signal_l2(g)).epsilon(1e-12));

  SECTION("linearity") {
    const auto h = builtin::ramp_decay(tg);
    const Spectrum H = forward_transform(h, fg);
    CausalSignal mix = g;
    for (std::size_t k = 0; k < tg.n; ++k)
      mix.values[k] = 2.0 * g.values[k] - 0.5 * h.values[k];
    const Spectrum M = forward_transform(mix, fg);
    for (std::size_t j = 0; j < fg.m; j += 503)
      CHECK(std::abs(M.values[j] - (2.0 * G.values[j] - 0.5 * H.values[j])) < 1e-13);
  }
}

TEST_CASE("unitarity on random band-limited signals", "[spectral]") {
  const TimeGrid tg(2e-3, 8193);
  const auto fg = FrequencyGrid::for_time_grid(tg);
  for (unsigned seed = 1; seed <= 20; ++seed) {
    const auto v = oracles::band_limited_signal(tg, seed);
    const Spectrum V = forward_transform(v, fg);
    const double nv = signal_l2(v), nV = spectrum_l2(V);
    REQUIRE(nv > 0.0);
    CHECK(std::abs(nV - nv) <= 1e-8 * nv);
  }
}

TEST_CASE("conjugate symmetry of real input", "[spectral]") {
  const TimeGrid tg(2e-3, 4097);
  const auto v = oracles::band_limited_signal(tg, 99);
  const Spectrum V = forward_transform(v, FrequencyGrid::for_time_grid(tg));
  CHECK(V.conjugate_asymmetry() <= 1e-10 * V.max_abs());
}

TEST_CASE("time-derivative rule for class members", "[spectral]") {
  // F(v')(iw) = iw F(v)(iw) up to O(dt^2) for smooth v with v(0) = 0
  const TimeGrid tg(1e-3, 20001);
  const auto v = builtin::exp_sin(tg);
  const auto fg = FrequencyGrid::for_time_grid(tg);
  const Spectrum V = forward_transform(v, fg);
  const Spectrum dV = forward_transform(differentiate(v), fg);
  double err2 = 0.0;
  for (std::size_t j = 0; j < fg.m; ++j) {
    const double w = fg.omega(j);
    if (std::abs(w) > 200.0) continue;  // compare in the resolved band
    err2 += std::norm(dV.values[j] - cdouble{0.0, w} * V.values[j]) * fg.domega;
  }
  CHECK(std::sqrt(err2) < 5e-4);
}

TEST_CASE("inverse transform round-trips and flags asymmetry", "[spectral]") {
  const TimeGrid tg(1e-3, 20001);
  const auto v = builtin::exp_sin(tg);
  const auto fg = FrequencyGrid::for_time_grid(tg);
  Spectrum V = forward_transform(v, fg);

  const InverseResult back = inverse_transform(V, tg);
  double err2 = 0.0;
  for (std::size_t k = 0; k < tg.n; ++k) {
    const double d = back.signal.values[k] - v.values[k];
    err2 += d * d * tg.dt;
  }
  CHECK(std::sqrt(err2) <= 1e-8 * signal_l2(v));
  CHECK(back.imag_residue < 1e-10);

  SECTION("analytic pair: 1/(sqrt(2pi)(1+iw)) inverts to e^{-t}") {
    const double dt = 1e-3;
    const TimeGrid tg2(dt, 10001);
    const auto fg2 = FrequencyGrid::for_time_grid(tg2, 20001);
    std::vector<cdouble> vals(fg2.m);
    for (std::size_t j = 0; j < fg2.m; ++j)
      vals[j] = oracles::one_sided_exp_transform(fg2.omega(j));
    const InverseResult rec = inverse_transform(Spectrum(fg2, std::move(vals)), tg2, 1e-6);
    // away from t=0 the reconstruction matches e^{-t}; near 0 the jump of the
    // one-sided exponential rings at the band edge (envelope ~ 1/(w_max t))
    double worst = 0.0;
    for (std::size_t k = 500; k < tg2.n - 100; ++k)
      worst = std::max(worst, std::abs(rec.signal.values[k] - std::exp(-tg2.time(k))));
    CHECK(worst < 1e-3);
  }

  SECTION("zero spectrum inverts to zero") {
    const Spectrum Z(fg, std::vector<cdouble>(fg.m, cdouble{0.0, 0.0}));
    const InverseResult z = inverse_transform(Z, tg);
    for (std::size_t k = 0; k < tg.n; k += 999) CHECK(z.signal.values[k] == 0.0);
  }

  SECTION("asymmetric spectrum is a domain error") {
    V.values[3] += cdouble{0.0, 10.0 * V.max_abs()};
    CHECK_THROWS_AS(inverse_transform(V, tg), std::domain_error);
  }
}

TEST_CASE("laplace_at: value, axis consistency, domain guard", "[spectral]") {
  const double dt = 1e-4;
  const TimeGrid tg(dt, 400001);
  const auto v = CausalSignal::from_function(tg, [](double t) { return std::exp(-t); });

  // (L e^{-t})(1) = 1/(2 sqrt(2 pi))
  const cdouble at1 = laplace_at(v, {1.0, 0.0});
  CHECK(at1.real() == Catch::Approx(0.19947114020071635).epsilon(1e-8));
  CHECK(std::abs(at1.imag()) < 1e-15);

  SECTION("zero signal maps to zero") {
    const CausalSignal z(tg, std::vector<double>(tg.n, 0.0));
    CHECK(std::abs(laplace_at(z, {0.5, 3.0})) == 0.0);
  }

  SECTION("coincides with forward_transform on the imaginary axis") {
    const TimeGrid tgs(1e-3, 4001);
    const auto g = builtin::exp_sin(tgs);
    const auto fg = FrequencyGrid::for_time_grid(tgs);
    const Spectrum G = forward_transform(g, fg);
    for (std::size_t j = fg.half() - 3; j <= fg.half() + 3; ++j) {
      const cdouble direct = laplace_at(g, {0.0, fg.omega(j)});
      CHECK(std::abs(direct - G.values[j]) < 1e-10);
    }
  }

  CHECK_THROWS_AS(laplace_at(v, {-0.1, 0.0}), std::domain_error);
}

TEST_CASE("transform grid guards", "[spectral]") {
  const TimeGrid tg(1e-2, 512);
  const auto g = builtin::exp_sin(tg);
  // omega_max beyond pi/dt: aliasing
  CHECK_THROWS_AS(forward_transform(g, FrequencyGrid(1.0, 1001)), config_error);
  // commensurate but too small to hold the signal
  CHECK_THROWS_AS(
      forward_transform(g, FrequencyGrid::for_time_grid(TimeGrid(1e-2, 200))),
      config_error);
}
