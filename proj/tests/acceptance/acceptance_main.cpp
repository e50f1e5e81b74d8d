// Acceptance suite: one line per criterion, [PASS]/[FAIL], nonzero exit on
// any failure.  Tolerances are fixed here, not read from configuration.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "../support/oracles.hpp"
#include "qheat/qheat.hpp"

using namespace qheat;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;
std::vector<std::string> g_notes;

double now_seconds() {
  using clock = std::chrono::steady_clock;
  static const clock::time_point start = clock::now();
  return std::chrono::duration<double>(clock::now() - start).count();
}

void report(int idx, const char* name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s  (%s)\n", pass ? "PASS" : "FAIL", idx, name,
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(double v) {
  char b[64];
  std::snprintf(b, sizeof b, "%.4g", v);
  return b;
}

// ---------------------------------------------------------------- criterion 1
void criterion_transform_unitarity() {
  const double t0 = now_seconds();
  const TimeGrid tg(2e-3, 8193);
  const auto fg = FrequencyGrid::for_time_grid(tg);
  double worst = 0.0;
  for (unsigned seed = 1; seed <= 20; ++seed) {
    const auto v = oracles::band_limited_signal(tg, seed);
    const Spectrum V = forward_transform(v, fg);
    double nv = l2_norm(v.values, tg.dt);
    double acc = 0.0;
    for (const auto& z : V.values) acc += std::norm(z);
    const double nV = std::sqrt(acc * fg.domega);
    worst = std::max(worst, std::abs(nV - nv) / nv);
  }
  const double dt = now_seconds() - t0;
  report(1, "transform unitarity (Plancherel)", worst <= 1e-8 && dt < 5.0,
         "max rel defect " + fmt(worst) + ", " + fmt(dt) + " s");
}

// ---------------------------------------------------------------- criterion 2
void criterion_root_contract() {
  const CoefficientSet cs{1, 1, 1, 1, 0};
  bool ok = true;
  std::string why;
  for (int i = 0; i < 10000 && ok; ++i) {
    const double w = -1000.0 + 2000.0 * static_cast<double>(i) / 9999.0;
    const cdouble p{0.0, w};
    const RootPair r = roots_at(cs, p);
    for (const cdouble lam : {r.lambda1, r.lambda2})
      if (std::abs(lam * lam + cs.b * lam + (cs.c + cs.a * p)) > 1e-12 * (1.0 + std::abs(w))) {
        ok = false;
        why = "quadratic residual at w=" + fmt(w);
      }
    if (r.lambda1.real() > -0.5 + 1e-13) {
      ok = false;
      why = "Re lambda1 > -b/2 at w=" + fmt(w);
    }
    if (std::abs(r.lambda1 + r.lambda2 + cs.b) > 1e-12 ||
        std::abs(r.lambda1 * r.lambda2 - (cs.c + cs.a * p)) > 1e-12 * (1.0 + std::abs(w))) {
      ok = false;
      why = "Vieta at w=" + fmt(w);
    }
    const RootPair rc = roots_at(cs, std::conj(p));
    if (std::abs(rc.lambda1 - std::conj(r.lambda1)) > 1e-12 ||
        std::abs(rc.lambda2 - std::conj(r.lambda2)) > 1e-12) {
      ok = false;
      why = "conjugate symmetry at w=" + fmt(w);
    }
  }
  const RootPair spot = roots_at(cs, {0.0, 1.0});
  if (std::abs(spot.lambda1 - cdouble{-1.0, 1.0}) > 1e-13 ||
      std::abs(spot.lambda2 - cdouble{0.0, -1.0}) > 1e-13) {
    ok = false;
    why = "spot value at p=i";
  }
  report(2, "characteristic-root contract", ok, ok ? "10^4 axis samples + spot value" : why);
}

// ---------------------------------------------------------------- criterion 3
struct SolverFidelityOut {
  Profile psi;          // u(., 5) of the base solve, reused by criterion 6
  CausalSignal g;       // the base boundary input
  CoefficientSet cs{1, 1, 1, 1, 0};
  bool have = false;
};

SolverFidelityOut criterion_solver_fidelity() {
  SolverFidelityOut out;
  const double t0 = now_seconds();
  const TimeGrid tg(1e-3, 20001);   // T = 20
  const SpaceGrid xg(1e-2, 801);    // X = 8
  const auto g = builtin::exp_sin(tg);
  const CoefficientSet cs{1, 1, 1, 1, 0};
  const SolveResult base = solve(g, cs, xg, FrequencyGrid::for_time_grid(tg));

  const double g_l2 = l2_norm(g.values, tg.dt);
  const bool bc_ok = base.report.bc_residual <= 1e-3 * g_l2;
  const bool ic_ok = base.report.ic_residual <= 1e-6;
  const bool pde_ok = base.report.pde_residual <= 1e-3;

  bool decay_ok = true;
  for (std::size_t i = 0; i < xg.nx && decay_ok; ++i) {
    const auto col = base.field.column(base.field.u, i);
    if (l2_norm(col, tg.dt) > std::exp(-xg.pos(i) / 2.0) * 0.35356) decay_ok = false;
  }

  double refined_pde = 0.0;
  {
    const TimeGrid tg2(5e-4, 40001);
    const SpaceGrid xg2(5e-3, 1601);
    const auto g2 = builtin::exp_sin(tg2);
    const SolveResult fine = solve(g2, cs, xg2, FrequencyGrid::for_time_grid(tg2));
    refined_pde = fine.report.pde_residual;
  }
  const double gain = refined_pde > 0.0 ? base.report.pde_residual / refined_pde : 1e9;
  const bool conv_ok = gain >= 3.0;
  const double dt = now_seconds() - t0;
  const bool time_ok = dt < 60.0;

  std::ostringstream os;
  os << "bc " << fmt(base.report.bc_residual) << (bc_ok ? " ok" : " XX") << ", ic "
     << fmt(base.report.ic_residual) << (ic_ok ? " ok" : " XX") << ", pde "
     << fmt(base.report.pde_residual) << (pde_ok ? " ok" : " XX") << ", refine x"
     << fmt(gain) << (conv_ok ? " ok" : " XX") << ", decay "
     << (decay_ok ? "ok" : "XX") << ", " << fmt(dt) << " s";
  report(3, "solver fidelity", bc_ok && ic_ok && pde_ok && conv_ok && decay_ok && time_ok,
         os.str());
  if (!ic_ok)
    g_notes.push_back(
        "criterion 3: the boundary input e^{-t} sin t carries spectral mass at w = 0, "
        "where the decaying-root selection jumps between conjugate branches; the "
        "reconstruction is then not causal and u(.,0) is pinned near |G(0)| "
        "independently of the grids.  Band-concentrated inputs (wave-packet builtin) "
        "reconstruct causally; see the unit suites.");
  if (!conv_ok)
    g_notes.push_back(
        "criterion 3: the finite-difference time residual of this input converges at "
        "order ~3/4 (u_tt is not square-integrable because g'(0+) != 0), so one "
        "refinement step gains ~2^(3/4) = 1.7x, not 3x.  Smooth band-concentrated "
        "inputs do refine at second order; see the unit suites.");

  out.psi = terminal_snapshot(base.field, 5.0);
  out.g = g;
  out.cs = cs;
  out.have = true;
  return out;
}

// ---------------------------------------------------------------- criterion 4
void criterion_regularity() {
  const CoefficientSet cs{1, 1, 1, 1, 0};
  auto family_ratio = [&](double dt, std::size_t n, double dx, std::size_t nx) {
    const TimeGrid tg(dt, n);
    const SpaceGrid xg(dx, nx);
    const auto fg = FrequencyGrid::for_time_grid(tg);
    std::vector<SolveReport> reports;
    for (int k = 1; k <= 10; ++k)
      reports.push_back(solve(builtin::exp_sin_k(tg, k), cs, xg, fg).report);
    return regularity_ratio(reports);
  };
  const double coarse = family_ratio(4e-3, 5001, 2e-2, 401);
  const double fine = family_ratio(2e-3, 10001, 1e-2, 801);
  const double drift = std::abs(fine - coarse) / coarse;
  const bool ok = std::isfinite(coarse) && std::isfinite(fine) && drift <= 0.05;
  report(4, "regularity ratio bounded and stable", ok,
         "ratio " + fmt(coarse) + " -> " + fmt(fine) + ", drift " + fmt(100 * drift) + "%");
}

// ---------------------------------------------------------------- criterion 5
void criterion_shift() {
  // T = 12: the e^{+Mt} lift amplifies the rounding floor by e^{MT}, and the
  // shifted input e^{-Mt} g is long decayed by then
  const TimeGrid tg(2e-3, 6001);
  const SpaceGrid xg(2e-2, 401);
  const auto fg = FrequencyGrid::for_time_grid(tg);
  const auto g = builtin::exp_sin(tg);

  // (1,2,0) with M=2: lifted solve against the manual composition
  const CoefficientSet ns{1, 2, 0, 1, 0};
  const SolveResult lifted = solve_shifted(g, ns, 2.0, xg, fg);
  CoefficientSet manual = ns;
  manual.c += ns.a * 2.0;
  CausalSignal gm = g;
  for (std::size_t k = 0; k < tg.n; ++k) gm.values[k] *= std::exp(-2.0 * tg.time(k));
  const SolveResult direct = solve(gm, manual, xg, fg);
  double worst = 0.0;
  for (std::size_t id = 0; id < lifted.field.u.size(); ++id) {
    const double t = tg.time(id % tg.n);
    worst = std::max(worst,
                     std::abs(std::exp(-2.0 * t) * lifted.field.u[id] - direct.field.u[id]));
  }
  const bool two_path_ok = worst <= 1e-8;

  // strict coefficients, M = 0: bitwise identical
  const CoefficientSet strict{1, 1, 1, 1, 0};
  const SolveResult a = solve(g, strict, xg, fg);
  const SolveResult b = solve_shifted(g, strict, 0.0, xg, fg);
  bool identical = true;
  for (std::size_t id = 0; id < a.field.u.size(); ++id)
    if (a.field.u[id] != b.field.u[id] || a.field.u_t[id] != b.field.u_t[id]) {
      identical = false;
      break;
    }
  report(5, "exponential shift", two_path_ok && identical,
         "two-path max diff " + fmt(worst) + ", M=0 " +
             (identical ? "bitwise identical" : "MISMATCH"));
}

// ---------------------------------------------------------------- criterion 6
void criterion_absorbing(const SolverFidelityOut& c3) {
  if (!c3.have) {
    report(6, "absorbing-boundary check", false, "criterion 3 artifacts unavailable");
    return;
  }
  const double T = 5.0;
  FdOracleOptions fo;
  fo.ds = 1e-3;
  const Profile matched = fd_forward_oracle(c3.psi, c3.g, c3.cs, T, fo);
  const double psi_l2 = l2_norm(c3.psi.values, c3.psi.xgrid.dx);
  const double matched_l2 = l2_norm(matched.values, c3.psi.xgrid.dx);

  CausalSignal shifted = c3.g;
  const auto off = static_cast<std::size_t>(std::llround(1.0 / c3.g.grid.dt));
  for (std::size_t k = shifted.grid.n; k-- > 0;)
    shifted.values[k] = k >= off ? c3.g.values[k - off] : 0.0;
  const Profile control = fd_forward_oracle(c3.psi, shifted, c3.cs, T, fo);
  const double control_l2 = l2_norm(control.values, c3.psi.xgrid.dx);

  const bool match_ok = matched_l2 <= 1e-2 * psi_l2;
  const bool control_ok = control_l2 >= 10.0 * matched_l2;
  report(6, "absorbing-boundary check", match_ok && control_ok,
         "|v(.,0)|/|v*| = " + fmt(matched_l2 / psi_l2) + (match_ok ? " ok" : " XX") +
             ", control x" + fmt(control_l2 / std::max(matched_l2, 1e-300)) +
             (control_ok ? " ok" : " XX"));
  if (!match_ok)
    g_notes.push_back(
        "criterion 6: the marched profile reproduces u(.,0) of the frequency-domain "
        "field; for this input u(.,0) is the non-causal component described under "
        "criterion 3, so the mismatch is inherited, not a marching error.");
}

// ---------------------------------------------------------------- criterion 7
void criterion_duality() {
  const double t0 = now_seconds();
  const TimeGrid tg(1e-3, 20001);
  struct Case {
    const char* label;
    CoefficientSet cs;
    CausalSignal g;
  };
  std::vector<Case> cases;
  cases.push_back({"exp-sin,(1,1,1)", {1, 1, 1, 1, 0}, builtin::exp_sin(tg)});
  cases.push_back({"wave-packet,(1,1,1)", {1, 1, 1, 1, 0}, builtin::wave_packet(tg)});
  cases.push_back(
      {"wave-packet(4,0.8,3),(1,1,1)", {1, 1, 1, 1, 0}, builtin::wave_packet(tg, 4.0, 0.8, 3.0)});
  cases.push_back({"exp-sin,(1,1,2)", {1, 1, 2, 1, 0}, builtin::exp_sin(tg)});
  cases.push_back({"exp-sin,(2,1.5,1.5)", {2, 1.5, 1.5, 1, 0}, builtin::exp_sin(tg)});

  bool all_ok = true;
  std::ostringstream os;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    DualityOptions opts;
    opts.xgrid = SpaceGrid(2e-2, 1301);  // X = 26 covers the killed density mass
    const DualityReport rep = duality_check(cases[i].g, cases[i].cs, InitialLaw::point(1.0),
                                            5.0, 1000 + i, 1000000, opts);
    const bool mc_ok = std::abs(rep.lhs_mc - rep.rhs) <= 3.0 * rep.lhs_stderr;
    const bool quad_ok = std::abs(rep.lhs_quadrature - rep.rhs) <= 1e-3;
    all_ok = all_ok && mc_ok && quad_ok;
    std::printf("    duality %-28s z=%7.2f  |quad-rhs|=%.3e  %s\n", cases[i].label,
                rep.z_score, std::abs(rep.lhs_quadrature - rep.rhs),
                (mc_ok && quad_ok) ? "ok" : "XX");
    std::fflush(stdout);
  }
  const double dt = now_seconds() - t0;
  const bool time_ok = dt < 600.0;
  report(7, "first-passage duality", all_ok && time_ok,
         std::string("5 configurations, ") + fmt(dt) + " s");
  if (!all_ok)
    g_notes.push_back(
        "criterion 7: the identity holds to Monte Carlo and quadrature accuracy exactly "
        "when the solve reconstructs causally (wave-packet rows); the exp-sin rows "
        "inherit the w=0 branch-seam defect of criterion 3 through Psi and u(.,0).");
}

// ---------------------------------------------------------------- criterion 8
void criterion_stochastic_oracles() {
  const std::size_t n = 1000000;
  ProcessParams p;
  p.beta = 1.0;
  p.sigma = std::sqrt(2.0);
  p.kappa = 0.0;
  p.rho = InitialLaw::point(1.0);

  // absorption probability, T = 50 as the infinity proxy
  p.T = 50.0;
  const auto far = sample_first_passage(p, 11, n);
  std::size_t hits = 0;
  for (const auto& s : far) hits += s.absorbed();
  const double phat = static_cast<double>(hits) / static_cast<double>(n);
  const double ptrue = std::exp(-1.0);
  const double se = std::sqrt(ptrue * (1.0 - ptrue) / static_cast<double>(n));
  const bool prob_ok = std::abs(phat - ptrue) <= 3.0 * se;

  // first-passage histogram
  p.T = 12.0;
  const auto mid = sample_first_passage(p, 12, n);
  Histogram th(0.0, 12.0, 50);
  for (const auto& s : mid)
    if (s.absorbed()) th.add(s.tau);
  const auto fres = chi2_against_density(
      th, [&](double t) { return fpt_density(1.0, p, std::max(t, 1e-12)); },
      static_cast<double>(n));

  // killed-density histogram at T = 1
  p.T = 1.0;
  const auto close = sample_first_passage(p, 13, n);
  Histogram yh(0.0, 8.0, 50);
  for (const auto& s : close)
    if (!s.absorbed()) yh.add(s.y_T);
  const auto kres = chi2_against_density(
      yh, [&](double x) { return killed_density(p, x, 1.0); }, static_cast<double>(n));

  const bool ok = prob_ok && fres.p_value > 0.01 && kres.p_value > 0.01;
  report(8, "stochastic oracles", ok,
         "P(tau<inf) z=" + fmt(std::abs(phat - ptrue) / se) + ", fpt chi2 p=" +
             fmt(fres.p_value) + ", killed chi2 p=" + fmt(kres.p_value));
}

// ---------------------------------------------------------------- criterion 9
void criterion_determinism() {
  const fs::path dir = fs::temp_directory_path() / "qheat_acceptance_determ";
  fs::remove_all(dir);
  fs::create_directories(dir);
  RunConfig rc;
  rc.command = Command::duality;
  rc.coefficients = {1, 1, 1, 1, 0};
  rc.grids = {2e-3, 8001, 0.04, 651, 0.0, 0};
  rc.signal.builtin = "wave-packet";
  rc.T = 5.0;
  rc.n_paths = 50000;
  rc.seed = 42;
  save_config(dir / "cfg.json", rc);

  auto run_to = [&](const std::string& sub) {
    const std::string cmd = std::string(QHEAT_CLI_PATH) + " --config " +
                            (dir / "cfg.json").string() + " --seed 42 --out " +
                            (dir / sub).string() + " > /dev/null 2>&1";
    return WEXITSTATUS(std::system(cmd.c_str())) == 0;
  };
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
  };
  bool ok = run_to("a") && run_to("b");
  for (const char* f : {"duality_report.txt", "duality.csv", "tau_hist.csv", "yT_hist.csv",
                        "config_echo.json"})
    ok = ok && !slurp(dir / "a" / f).empty() && slurp(dir / "a" / f) == slurp(dir / "b" / f);
  report(9, "seeded runs are byte-identical", ok, ok ? "all artifacts match" : "divergence");
}

}  // namespace

int main() {
  std::printf("acceptance suite\n");
  criterion_transform_unitarity();
  criterion_root_contract();
  const SolverFidelityOut c3 = criterion_solver_fidelity();
  criterion_regularity();
  criterion_shift();
  criterion_absorbing(c3);
  criterion_duality();
  criterion_stochastic_oracles();
  criterion_determinism();

  if (!g_notes.empty()) {
    std::printf("\nnotes on failed criteria:\n");
    for (const auto& n : g_notes) std::printf("  - %s\n", n.c_str());
  }
  std::printf("\n%d criterion(s) failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
