// Configuration-driven entry point: validation, solves, shift solves,
// absorbing checks, duality experiments.  Exit codes: 0 success, 1 I/O or
// configuration error, 2 validation failure, 3 numerical-tolerance failure.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "qheat/qheat.hpp"

namespace fs = std::filesystem;
using namespace qheat;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitValidation = 2;
constexpr int kExitTolerance = 3;

CausalSignal make_signal(const RunConfig& rc) {
  const TimeGrid tg(rc.grids.dt, rc.grids.n);
  CausalSignal sig = !rc.signal.path.empty() ? io::read_signal(rc.signal.path)
                                             : builtin::by_name(rc.signal.builtin, tg);
  if (rc.signal.scale != 1.0)
    for (double& v : sig.values) v *= rc.signal.scale;
  return sig;
}

FrequencyGrid make_fgrid(const RunConfig& rc, const TimeGrid& tg) {
  if (rc.grids.m >= 3 && rc.grids.domega > 0.0)
    return FrequencyGrid(rc.grids.domega, rc.grids.m);
  return FrequencyGrid::for_time_grid(tg);
}

InitialLaw make_rho(const RunConfig& rc) {
  if (!rc.rho.path.empty()) {
    const CausalSignal tab = io::read_signal(rc.rho.path);
    std::vector<double> xs(tab.grid.n);
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = tab.grid.time(i);
    return InitialLaw::tabulated(std::move(xs), tab.values);
  }
  return InitialLaw::point(rc.rho.point);
}

std::vector<std::pair<std::string, std::string>> gamma_kv(const GammaReport& rep) {
  return {{"is_member", rep.is_member ? "true" : "false"},
          {"l2_norm", io::fmt(rep.l2_norm)},
          {"deriv_l2_norm", io::fmt(rep.deriv_l2_norm)},
          {"w12_norm", io::fmt(rep.w12_norm)},
          {"rejection_reason", rep.rejection_reason.value_or("")}};
}

std::vector<std::pair<std::string, std::string>> solve_kv(const SolveReport& rep) {
  return {{"w_norm", io::fmt(rep.w_norm)},
          {"w12_norm_g", io::fmt(rep.w12_norm_g)},
          {"ratio", io::fmt(rep.ratio)},
          {"pde_residual", io::fmt(rep.pde_residual)},
          {"bc_residual", io::fmt(rep.bc_residual)},
          {"ic_residual", io::fmt(rep.ic_residual)},
          {"imag_residue", io::fmt(rep.imag_residue)}};
}

void write_profile(const fs::path& path, const Profile& p) {
  auto out = io::open_out(path);
  out << "x,value\n";
  for (std::size_t i = 0; i < p.values.size(); ++i)
    out << io::fmt(p.xgrid.pos(i)) << ',' << io::fmt(p.values[i]) << '\n';
}

int run_validate(const RunConfig& rc, const fs::path& outdir, bool norms_only) {
  const CausalSignal sig = make_signal(rc);
  const GammaReport rep = validate_gamma(sig, rc.tolerances.gamma_tol);
  auto kv = gamma_kv(rep);
  if (norms_only && rep.is_member) kv.emplace_back("w12_norm_repeat", io::fmt(rep.w12_norm));
  io::write_kv(outdir / (norms_only ? "norms_report.txt" : "gamma_report.txt"), kv);
  io::write_signal(outdir / "signal.csv", sig);
  if (!rep.is_member) {
    std::cerr << "validation failed: " << rep.rejection_reason.value_or("not in class")
              << '\n';
    return kExitValidation;
  }
  return kExitOk;
}

int run_solve(const RunConfig& rc, const fs::path& outdir, bool shifted) {
  const CausalSignal sig = make_signal(rc);
  const Admissibility adm = check_admissible(rc.coefficients);
  if (adm.kind == AdmissibilityKind::Rejected) {
    std::cerr << "admissibility: rejected: " << adm.reason << '\n';
    return kExitValidation;
  }
  if (!shifted && adm.kind == AdmissibilityKind::NeedsShift) {
    std::cerr << "admissibility: " << adm.reason << " (use shift-solve)\n";
    return kExitValidation;
  }
  const SpaceGrid xg(rc.grids.dx, rc.grids.nx);
  const FrequencyGrid fg = make_fgrid(rc, sig.grid);
  SolveOptions opts;
  opts.threads = rc.threads;
  opts.gamma_tol = rc.tolerances.gamma_tol;
  const SolveResult res = shifted
                              ? solve_shifted(sig, rc.coefficients, rc.M, xg, fg, opts)
                              : solve(sig, rc.coefficients, xg, fg, opts);
  io::write_field(outdir / "field.csv", res.field);
  io::write_kv(outdir / "solve_report.txt", solve_kv(res.report));
  io::write_roots(outdir / "roots.csv", rc.coefficients, fg);
  if (rc.strict_tolerances) {
    const auto& t = rc.tolerances;
    const double gref = res.report.w12_norm_g > 0 ? res.report.w12_norm_g : 1.0;
    if (res.report.bc_residual > t.bc_rel * gref ||
        res.report.ic_residual > t.ic_abs || res.report.pde_residual > t.pde_rel) {
      std::cerr << "solve residuals exceed configured tolerances\n";
      return kExitTolerance;
    }
  }
  return kExitOk;
}

int run_absorb_check(const RunConfig& rc, const fs::path& outdir) {
  const CausalSignal sig = make_signal(rc);
  const SpaceGrid xg(rc.grids.dx, rc.grids.nx);
  const FrequencyGrid fg = make_fgrid(rc, sig.grid);
  SolveOptions opts;
  opts.threads = rc.threads;
  opts.skip_report = true;
  const SolveResult res = solve(sig, rc.coefficients, xg, fg, opts);
  const Profile psi = terminal_snapshot(res.field, rc.T);
  const Profile recovered = fd_forward_oracle(psi, sig, rc.coefficients, rc.T);

  // negative control: the same snapshot against a time-shifted input
  CausalSignal mismatched = sig;
  const auto shift = static_cast<std::size_t>(std::llround(1.0 / sig.grid.dt));
  for (std::size_t k = mismatched.grid.n; k-- > 0;)
    mismatched.values[k] = k >= shift ? sig.values[k - shift] : 0.0;
  const Profile control = fd_forward_oracle(psi, mismatched, rc.coefficients, rc.T);

  const double psin = l2_norm(psi.values, xg.dx);
  const double vn = l2_norm(recovered.values, xg.dx);
  const double cn = l2_norm(control.values, xg.dx);
  io::write_kv(outdir / "absorb_report.txt",
               {{"psi_l2", io::fmt(psin)},
                {"recovered_l2", io::fmt(vn)},
                {"recovered_over_psi", io::fmt(psin > 0 ? vn / psin : 0.0)},
                {"mismatched_l2", io::fmt(cn)},
                {"mismatched_over_matched", io::fmt(vn > 0 ? cn / vn : 0.0)}});
  write_profile(outdir / "psi.csv", psi);
  write_profile(outdir / "recovered.csv", recovered);
  if (rc.strict_tolerances && psin > 0 && vn / psin > rc.tolerances.absorb_rel) {
    std::cerr << "absorbing check exceeded tolerance\n";
    return kExitTolerance;
  }
  return kExitOk;
}

int run_duality(const RunConfig& rc, const fs::path& outdir) {
  const CausalSignal sig = make_signal(rc);
  const InitialLaw rho = make_rho(rc);
  DualityOptions opts;
  opts.xgrid = SpaceGrid(rc.grids.dx, rc.grids.nx);
  opts.threads = rc.threads;
  const DualityReport rep =
      duality_check(sig, rc.coefficients, rho, rc.T, rc.seed, rc.n_paths, opts);

  io::write_kv(outdir / "duality_report.txt",
               {{"lhs_mc", io::fmt(rep.lhs_mc)},
                {"lhs_stderr", io::fmt(rep.lhs_stderr)},
                {"lhs_quadrature", io::fmt(rep.lhs_quadrature)},
                {"rhs", io::fmt(rep.rhs)},
                {"z_score", io::fmt(rep.z_score)}});
  {
    auto out = io::open_out(outdir / "duality.csv");
    out << "lhs_mc,lhs_stderr,lhs_quadrature,rhs,z_score\n"
        << io::fmt(rep.lhs_mc) << ',' << io::fmt(rep.lhs_stderr) << ','
        << io::fmt(rep.lhs_quadrature) << ',' << io::fmt(rep.rhs) << ','
        << io::fmt(rep.z_score) << '\n';
  }
  {
    // histogram dumps from a fresh deterministic sample of the same process
    ProcessParams params = ProcessParams::from_coefficients(rc.coefficients, rc.T, rho);
    SamplingOptions sopts;
    sopts.threads = rc.threads;
    const auto paths = sample_first_passage(params, rc.seed, rc.n_paths, sopts);
    Histogram tau_h(0.0, rc.T, 50);
    Histogram y_h(0.0, 0.0 + 4.0 * params.sigma * std::sqrt(rc.T) + rc.rho.point +
                           params.beta * rc.T,
                  50);
    for (const auto& p : paths) {
      if (p.absorbed())
        tau_h.add(p.tau);
      else
        y_h.add(p.y_T);
    }
    io::write_histogram(outdir / "tau_hist.csv", tau_h);
    io::write_histogram(outdir / "yT_hist.csv", y_h);
  }
  if (rc.strict_tolerances &&
      (rep.z_score > rc.tolerances.duality_z ||
       std::abs(rep.lhs_quadrature - rep.rhs) > rc.tolerances.duality_quad_abs)) {
    std::cerr << "duality identity outside configured tolerances\n";
    return kExitTolerance;
  }
  return kExitOk;
}

int run(const RunConfig& rc) {
  const fs::path outdir(rc.output_dir);
  std::error_code ec;
  fs::create_directories(outdir, ec);
  if (ec) throw config_error("cannot create output dir: " + outdir.string());
  save_config(outdir / "config_echo.json", rc);

  switch (rc.command) {
    case Command::validate: return run_validate(rc, outdir, false);
    case Command::norms: return run_validate(rc, outdir, true);
    case Command::solve: return run_solve(rc, outdir, false);
    case Command::shift_solve: return run_solve(rc, outdir, true);
    case Command::absorb_check: return run_absorb_check(rc, outdir);
    case Command::duality: return run_duality(rc, outdir);
  }
  throw config_error("unhandled command");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quarter-plane parabolic inverse solver"};
  std::string config_path;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string outdir;
  bool strict = false;
  bool have_seed = false, have_threads = false, have_out = false;
  app.add_option("--config", config_path, "run configuration (JSON)")->required();
  app.add_option("--seed", seed, "override config seed")->each([&](const std::string&) {
    have_seed = true;
  });
  app.add_option("--threads", threads, "worker cap (0 = hardware)")
      ->each([&](const std::string&) { have_threads = true; });
  app.add_option("--out", outdir, "override output directory")
      ->each([&](const std::string&) { have_out = true; });
  app.add_flag("--strict-tolerances", strict,
               "exit 3 when a checked quantity exceeds its configured tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    RunConfig rc = load_config(config_path);
    if (have_seed) rc.seed = seed;
    if (have_threads) rc.threads = threads;
    if (have_out) rc.output_dir = outdir;
    if (strict) rc.strict_tolerances = true;
    return run(rc);
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const numerical_error& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitTolerance;
  } catch (const std::domain_error& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}
