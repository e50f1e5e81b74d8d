#pragma once

// Self-contained complex FFT: iterative radix-2 for power-of-two sizes plus a
// Bluestein chirp-z wrapper for arbitrary (here: odd) lengths.  Plans are
// immutable after construction and cached per length; per-call scratch lives
// in a caller-owned workspace so concurrent executions never share state.

#include <bit>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace qheat::fft {

using cdouble = std::complex<double>;

namespace detail {

struct Pow2Tables {
  std::size_t n = 0;
  std::vector<cdouble> twiddle;       // e^{-2pi i k / n}, k < n/2
  std::vector<std::uint32_t> bitrev;  // index permutation

  explicit Pow2Tables(std::size_t n_) : n(n_) {
    if (n == 0 || (n & (n - 1)) != 0)
      throw std::invalid_argument("Pow2Tables: size must be a power of two");
    twiddle.resize(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
      const double a = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
      twiddle[k] = {std::cos(a), std::sin(a)};
    }
    const int bits = std::countr_zero(n);
    bitrev.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::uint32_t r = 0;
      for (int b = 0; b < bits; ++b) r |= ((i >> b) & 1u) << (bits - 1 - b);
      bitrev[i] = r;
    }
  }

  // In-place DFT (inverse = conjugated twiddles, no 1/n scaling).
  void run(cdouble* a, bool inverse) const {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = bitrev[i];
      if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
      const std::size_t half = len >> 1;
      const std::size_t stride = n / len;
      for (std::size_t base = 0; base < n; base += len) {
        for (std::size_t k = 0; k < half; ++k) {
          cdouble w = twiddle[k * stride];
          if (inverse) w = std::conj(w);
          const cdouble t = a[base + k + half] * w;
          const cdouble u = a[base + k];
          a[base + k] = u + t;
          a[base + k + half] = u - t;
        }
      }
    }
  }
};

}  // namespace detail

// Scratch buffers for one executing thread.
struct Workspace {
  std::vector<cdouble> a;
};

// DFT of arbitrary length m: X_j = sum_k x_k e^{-2pi i jk/m}.
// Bluestein: jk = (j^2 + k^2 - (j-k)^2)/2 turns the sum into a convolution
// with the chirp e^{+i pi l^2/m}, evaluated by power-of-two FFTs.
class DftPlan {
 public:
  explicit DftPlan(std::size_t m) : m_(m) {
    if (m < 2) throw std::invalid_argument("DftPlan: size must be >= 2");
    N_ = std::bit_ceil(2 * m - 1);
    p2_ = std::make_unique<detail::Pow2Tables>(N_);
    chirp_.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
      // k^2 mod 2m keeps the phase argument small and exact.
      const std::uint64_t q = (static_cast<std::uint64_t>(k) * k) % (2 * m);
      const double a = -std::numbers::pi * static_cast<double>(q) / static_cast<double>(m);
      chirp_[k] = {std::cos(a), std::sin(a)};
    }
    bhat_.assign(N_, cdouble{0.0, 0.0});
    bhat_[0] = std::conj(chirp_[0]);
    for (std::size_t l = 1; l < m; ++l) {
      bhat_[l] = std::conj(chirp_[l]);
      bhat_[N_ - l] = std::conj(chirp_[l]);
    }
    p2_->run(bhat_.data(), false);
  }

  std::size_t size() const { return m_; }

  // out[j] = sum_k in[k] e^{-2pi i jk/m}; in/out may alias.
  void forward(std::span<const cdouble> in, std::span<cdouble> out, Workspace& ws) const {
    execute(in, out, ws, false);
  }

  // out[j] = (1/m) sum_k in[k] e^{+2pi i jk/m}.
  void inverse(std::span<const cdouble> in, std::span<cdouble> out, Workspace& ws) const {
    execute(in, out, ws, true);
    const double s = 1.0 / static_cast<double>(m_);
    for (auto& v : out) v *= s;
  }

 private:
  void execute(std::span<const cdouble> in, std::span<cdouble> out, Workspace& ws,
               bool inverse) const {
    if (in.size() != m_ || out.size() != m_)
      throw std::invalid_argument("DftPlan: buffer size mismatch");
    auto& a = ws.a;
    a.assign(N_, cdouble{0.0, 0.0});
    if (!inverse) {
      for (std::size_t k = 0; k < m_; ++k) a[k] = in[k] * chirp_[k];
    } else {
      for (std::size_t k = 0; k < m_; ++k) a[k] = std::conj(in[k]) * chirp_[k];
    }
    p2_->run(a.data(), false);
    for (std::size_t i = 0; i < N_; ++i) a[i] *= bhat_[i];
    p2_->run(a.data(), true);
    const double s = 1.0 / static_cast<double>(N_);
    if (!inverse) {
      for (std::size_t j = 0; j < m_; ++j) out[j] = a[j] * chirp_[j] * s;
    } else {
      for (std::size_t j = 0; j < m_; ++j) out[j] = std::conj(a[j] * chirp_[j] * s);
    }
  }

  std::size_t m_ = 0;
  std::size_t N_ = 0;
  std::unique_ptr<detail::Pow2Tables> p2_;
  std::vector<cdouble> chirp_;
  std::vector<cdouble> bhat_;
};

// Process-wide plan cache.  Plans are immutable once built, so sharing the
// shared_ptr across threads is safe; only the map itself is locked.
inline std::shared_ptr<const DftPlan> plan_for(std::size_t m) {
  static std::mutex mu;
  static std::unordered_map<std::size_t, std::shared_ptr<const DftPlan>> cache;
  std::scoped_lock lock(mu);
  auto it = cache.find(m);
  if (it != cache.end()) return it->second;
  auto plan = std::make_shared<const DftPlan>(m);
  cache.emplace(m, plan);
  return plan;
}

}  // namespace qheat::fft
