#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qheat/roots.hpp"
#include "qheat/signal.hpp"
#include "qheat/solver.hpp"
#include "qheat/spectral.hpp"
#include "qheat/stats.hpp"

namespace qheat::io {

// All numeric output goes through one shortest-roundtrip formatter so that
// repeated runs produce byte-identical files.
inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  return out;
}

// --- signal: columns t,value; header required; uniform t from 0 ---

inline void write_signal(const std::filesystem::path& path, const CausalSignal& sig) {
  auto out = open_out(path);
  out << "t,value\n";
  for (std::size_t k = 0; k < sig.grid.n; ++k)
    out << fmt(sig.grid.time(k)) << ',' << fmt(sig.values[k]) << '\n';
}

inline CausalSignal read_signal(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open signal file: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty signal file: " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t,value")
    throw std::runtime_error("signal CSV must start with header 't,value': " + path.string());
  std::vector<double> ts, vs;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("signal CSV line " + std::to_string(lineno) + ": missing comma");
    try {
      ts.push_back(std::stod(line.substr(0, comma)));
      vs.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw std::runtime_error("signal CSV line " + std::to_string(lineno) + ": bad number");
    }
  }
  if (ts.size() < 2) throw std::runtime_error("signal CSV needs at least 2 samples");
  if (std::abs(ts[0]) > 1e-12)
    throw std::runtime_error("signal CSV must start at t = 0");
  const double dt = ts[1] - ts[0];
  if (!(dt > 0.0)) throw std::runtime_error("signal CSV: t must be strictly increasing");
  for (std::size_t k = 1; k < ts.size(); ++k) {
    const double expect = static_cast<double>(k) * dt;
    if (std::abs(ts[k] - expect) > 1e-9 * std::max(1.0, std::abs(expect)))
      throw std::runtime_error("signal CSV: non-uniform spacing at row " +
                               std::to_string(k + 1));
  }
  return CausalSignal(TimeGrid(dt, ts.size()), std::move(vs));
}

// --- spectrum: columns omega,re,im ---

inline void write_spectrum(const std::filesystem::path& path, const Spectrum& spec) {
  auto out = open_out(path);
  out << "omega,re,im\n";
  for (std::size_t j = 0; j < spec.grid.m; ++j)
    out << fmt(spec.grid.omega(j)) << ',' << fmt(spec.values[j].real()) << ','
        << fmt(spec.values[j].imag()) << '\n';
}

// --- field: long format x,t,u,u_x,u_xx,u_t ---

inline void write_field(const std::filesystem::path& path, const FieldGrid& f) {
  auto out = open_out(path);
  out << "x,t,u,u_x,u_xx,u_t\n";
  for (std::size_t i = 0; i < f.xgrid.nx; ++i)
    for (std::size_t k = 0; k < f.tgrid.n; ++k) {
      const std::size_t id = f.idx(i, k);
      out << fmt(f.xgrid.pos(i)) << ',' << fmt(f.tgrid.time(k)) << ',' << fmt(f.u[id]) << ','
          << fmt(f.u_x[id]) << ',' << fmt(f.u_xx[id]) << ',' << fmt(f.u_t[id]) << '\n';
    }
}

// --- roots diagnostic: omega,re_l1,im_l1,re_l2,im_l2 ---

inline void write_roots(const std::filesystem::path& path, const CoefficientSet& cs,
                        const FrequencyGrid& fg) {
  auto out = open_out(path);
  out << "omega,re_l1,im_l1,re_l2,im_l2\n";
  for (std::size_t j = 0; j < fg.m; ++j) {
    const double w = fg.omega(j);
    const RootPair r = roots_at(cs, {0.0, w});
    out << fmt(w) << ',' << fmt(r.lambda1.real()) << ',' << fmt(r.lambda1.imag()) << ','
        << fmt(r.lambda2.real()) << ',' << fmt(r.lambda2.imag()) << '\n';
  }
}

// --- histogram: bin_left,bin_right,count ---

inline void write_histogram(const std::filesystem::path& path, const Histogram& h) {
  auto out = open_out(path);
  out << "bin_left,bin_right,count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i)
    out << fmt(h.bin_left(i)) << ',' << fmt(h.bin_right(i)) << ',' << h.counts[i] << '\n';
}

// --- flat key-value report block ---

inline void write_kv(const std::filesystem::path& path,
                     const std::vector<std::pair<std::string, std::string>>& kv) {
  auto out = open_out(path);
  for (const auto& [k, v] : kv) out << k << " = " << v << '\n';
}

}  // namespace qheat::io
