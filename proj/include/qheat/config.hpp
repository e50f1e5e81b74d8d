#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "qheat/coefficients.hpp"
#include "qheat/errors.hpp"
#include "qheat/grids.hpp"

namespace qheat {

enum class Command { validate, solve, shift_solve, absorb_check, duality, norms };

inline std::string to_string(Command c) {
  switch (c) {
    case Command::validate: return "validate";
    case Command::solve: return "solve";
    case Command::shift_solve: return "shift-solve";
    case Command::absorb_check: return "absorb-check";
    case Command::duality: return "duality";
    case Command::norms: return "norms";
  }
  return "?";
}

inline Command command_from_string(const std::string& s) {
  if (s == "validate") return Command::validate;
  if (s == "solve") return Command::solve;
  if (s == "shift-solve") return Command::shift_solve;
  if (s == "absorb-check") return Command::absorb_check;
  if (s == "duality") return Command::duality;
  if (s == "norms") return Command::norms;
  throw config_error("unknown command: " + s);
}

struct GridConfig {
  double dt = 1e-2;
  std::size_t n = 2001;
  double dx = 0.1;
  std::size_t nx = 201;
  double domega = 0.0;  // 0 = derive from (dt, n)
  std::size_t m = 0;
};

struct SignalConfig {
  std::string builtin;  // one of the builtin generator names, or empty
  std::string path;     // CSV path, or empty
  double scale = 1.0;
};

struct RhoConfig {
  double point = 1.0;
  std::string path;  // optional tabulated density CSV (t,value layout)
};

struct Tolerances {
  double gamma_tol = 1e-6;
  double sym_tol = 1e-8;
  double bc_rel = 1e-3;
  double ic_abs = 1e-6;
  double pde_rel = 1e-3;
  double absorb_rel = 1e-2;
  double duality_z = 3.0;
  double duality_quad_abs = 1e-3;
};

struct RunConfig {
  Command command = Command::validate;
  CoefficientSet coefficients{};
  GridConfig grids{};
  SignalConfig signal{};
  RhoConfig rho{};
  double M = 0.0;
  double T = 1.0;
  std::uint64_t seed = 1;
  std::size_t n_paths = 100000;
  Tolerances tolerances{};
  std::string output_dir = "out";
  unsigned threads = 0;
  bool strict_tolerances = false;
};

namespace detail {
template <typename T>
void maybe(const nlohmann::json& j, const char* key, T& slot) {
  if (j.contains(key)) slot = j.at(key).get<T>();
}
}  // namespace detail

inline nlohmann::json to_json(const RunConfig& rc) {
  nlohmann::json j;
  j["command"] = to_string(rc.command);
  j["coefficients"] = {{"a", rc.coefficients.a},
                       {"b", rc.coefficients.b},
                       {"c", rc.coefficients.c},
                       {"k0", rc.coefficients.k0},
                       {"k1", rc.coefficients.k1}};
  j["grids"] = {{"dt", rc.grids.dt}, {"n", rc.grids.n},         {"dx", rc.grids.dx},
                {"nx", rc.grids.nx}, {"domega", rc.grids.domega}, {"m", rc.grids.m}};
  j["signal"] = {{"builtin", rc.signal.builtin}, {"path", rc.signal.path},
                 {"scale", rc.signal.scale}};
  j["rho"] = {{"point", rc.rho.point}, {"path", rc.rho.path}};
  j["M"] = rc.M;
  j["T"] = rc.T;
  j["seed"] = rc.seed;
  j["n_paths"] = rc.n_paths;
  j["tolerances"] = {{"gamma_tol", rc.tolerances.gamma_tol},
                     {"sym_tol", rc.tolerances.sym_tol},
                     {"bc_rel", rc.tolerances.bc_rel},
                     {"ic_abs", rc.tolerances.ic_abs},
                     {"pde_rel", rc.tolerances.pde_rel},
                     {"absorb_rel", rc.tolerances.absorb_rel},
                     {"duality_z", rc.tolerances.duality_z},
                     {"duality_quad_abs", rc.tolerances.duality_quad_abs}};
  j["output_dir"] = rc.output_dir;
  j["threads"] = rc.threads;
  j["strict_tolerances"] = rc.strict_tolerances;
  return j;
}

inline RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig rc;
  try {
    rc.command = command_from_string(j.at("command").get<std::string>());
    if (j.contains("coefficients")) {
      const auto& c = j.at("coefficients");
      detail::maybe(c, "a", rc.coefficients.a);
      detail::maybe(c, "b", rc.coefficients.b);
      detail::maybe(c, "c", rc.coefficients.c);
      detail::maybe(c, "k0", rc.coefficients.k0);
      detail::maybe(c, "k1", rc.coefficients.k1);
    }
    if (j.contains("grids")) {
      const auto& g = j.at("grids");
      detail::maybe(g, "dt", rc.grids.dt);
      detail::maybe(g, "n", rc.grids.n);
      detail::maybe(g, "dx", rc.grids.dx);
      detail::maybe(g, "nx", rc.grids.nx);
      detail::maybe(g, "domega", rc.grids.domega);
      detail::maybe(g, "m", rc.grids.m);
    }
    if (j.contains("signal")) {
      const auto& s = j.at("signal");
      detail::maybe(s, "builtin", rc.signal.builtin);
      detail::maybe(s, "path", rc.signal.path);
      detail::maybe(s, "scale", rc.signal.scale);
    }
    if (j.contains("rho")) {
      const auto& r = j.at("rho");
      detail::maybe(r, "point", rc.rho.point);
      detail::maybe(r, "path", rc.rho.path);
    }
    detail::maybe(j, "M", rc.M);
    detail::maybe(j, "T", rc.T);
    detail::maybe(j, "seed", rc.seed);
    detail::maybe(j, "n_paths", rc.n_paths);
    if (j.contains("tolerances")) {
      const auto& t = j.at("tolerances");
      detail::maybe(t, "gamma_tol", rc.tolerances.gamma_tol);
      detail::maybe(t, "sym_tol", rc.tolerances.sym_tol);
      detail::maybe(t, "bc_rel", rc.tolerances.bc_rel);
      detail::maybe(t, "ic_abs", rc.tolerances.ic_abs);
      detail::maybe(t, "pde_rel", rc.tolerances.pde_rel);
      detail::maybe(t, "absorb_rel", rc.tolerances.absorb_rel);
      detail::maybe(t, "duality_z", rc.tolerances.duality_z);
      detail::maybe(t, "duality_quad_abs", rc.tolerances.duality_quad_abs);
    }
    detail::maybe(j, "output_dir", rc.output_dir);
    detail::maybe(j, "threads", rc.threads);
    detail::maybe(j, "strict_tolerances", rc.strict_tolerances);
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("bad run configuration: ") + e.what());
  }
  return rc;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json(j);
}

inline void save_config(const std::filesystem::path& path, const RunConfig& rc) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw config_error("cannot write config: " + path.string());
  out << to_json(rc).dump(2) << '\n';
}

}  // namespace qheat
