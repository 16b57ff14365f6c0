#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "mvqmc/errors.hpp"

namespace mvqmc {

/// Identifies one independent random stream. Identical keys yield
/// bit-identical sequences; distinct keys yield statistically independent
/// streams regardless of how work is scheduled across threads.
struct StreamKey {
  std::uint64_t seed = 0;
  std::uint64_t path_id = 0;
  std::uint64_t step_id = 0;
  std::uint64_t substream = 0;
};

namespace detail {

/// One 256-bit block of the Philox-4x64-10 counter-based generator
/// (Salmon et al., SC'11 constants).
inline std::array<std::uint64_t, 4> philox4x64(std::array<std::uint64_t, 4> ctr,
                                               std::array<std::uint64_t, 2> key) {
  constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
  constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
  constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
  constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;
  for (int round = 0; round < 10; ++round) {
    const unsigned __int128 p0 = static_cast<unsigned __int128>(kMul0) * ctr[0];
    const unsigned __int128 p1 = static_cast<unsigned __int128>(kMul1) * ctr[2];
    const std::uint64_t hi0 = static_cast<std::uint64_t>(p0 >> 64);
    const std::uint64_t lo0 = static_cast<std::uint64_t>(p0);
    const std::uint64_t hi1 = static_cast<std::uint64_t>(p1 >> 64);
    const std::uint64_t lo1 = static_cast<std::uint64_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

}  // namespace detail

/// Standard normal quantile: Hastings rational initial guess refined by
/// three Newton iterations on Phi(x) = p, accurate to ~1e-15 relative.
inline double normal_icdf(double p) {
  const bool upper = p > 0.5;
  const double q = upper ? 1.0 - p : p;
  const double t = std::sqrt(-2.0 * std::log(q));
  double x = -(t - (2.515517 + t * (0.802853 + t * 0.010328)) /
                       (1.0 + t * (1.432788 + t * (0.189269 + t * 0.001308))));
  constexpr double kInvSqrt2 = 0.7071067811865475244;
  constexpr double kInvSqrt2Pi = 0.3989422804014326779;
  for (int it = 0; it < 3; ++it) {
    const double cdf = 0.5 * std::erfc(-x * kInvSqrt2);
    const double pdf = kInvSqrt2Pi * std::exp(-0.5 * x * x);
    x -= (cdf - q) / pdf;
  }
  return upper ? -x : x;
}

/// Sequential view of the stream identified by a key.
class RandomStream {
 public:
  explicit RandomStream(const StreamKey& k)
      : key_{k.seed, 0}, ctr_{k.path_id, k.step_id, k.substream, 0} {}

  std::uint64_t next_u64() {
    if (pos_ == 4) {
      buf_ = detail::philox4x64(ctr_, key_);
      ++ctr_[3];
      pos_ = 0;
    }
    return buf_[pos_++];
  }

  /// Uniform draw on the open interval (0,1) with 53-bit resolution.
  double next_uniform() {
    const std::uint64_t r = next_u64();
    return (static_cast<double>(r >> 11) + 0.5) * 0x1.0p-53;
  }

  double next_gaussian(double variance) {
    return std::sqrt(variance) * normal_icdf(next_uniform());
  }

 private:
  std::array<std::uint64_t, 2> key_;
  std::array<std::uint64_t, 4> ctr_;
  std::array<std::uint64_t, 4> buf_{};
  int pos_ = 4;
};

/// n i.i.d. N(0, variance) draws, deterministic in the key.
inline std::vector<double> gaussian(const StreamKey& key, std::size_t n, double variance) {
  if (!(variance >= 0.0)) throw config_error("gaussian: variance must be >= 0");
  std::vector<double> out(n, 0.0);
  if (variance == 0.0) return out;
  RandomStream rs(key);
  for (auto& v : out) v = rs.next_gaussian(variance);
  return out;
}

/// Wiener increments over one step together with the iterated integrals
/// that a weak-order-2 step consumes.
struct NoiseDraw {
  std::vector<double> dw;   ///< each ~ N(0,h)
  std::vector<double> i10;  ///< time-integrated Brownian bridge component
};

namespace detail {

inline void sample_noise_into(RandomStream& rs, double h, std::span<double> dw,
                              std::span<double> i10) {
  constexpr double kInvSqrt3 = 0.5773502691896257645;
  for (auto& v : dw) v = rs.next_gaussian(h);
  for (std::size_t j = 0; j < i10.size(); ++j) {
    const double zeta = rs.next_gaussian(h);
    i10[j] = 0.5 * h * (dw[j] + kInvSqrt3 * zeta);
  }
}

}  // namespace detail

/// Samples (dW, I10) for an m-dimensional driving noise over a step of
/// length h: I10_j = h/2 * (dW_j + zeta_j/sqrt(3)) with independent
/// zeta_j ~ N(0,h), so E[I10^2] = h^3/3 and E[dW I10] = h^2/2.
inline NoiseDraw sample_noise(const StreamKey& key, std::size_t m, double h) {
  if (!(h > 0.0)) throw config_error("sample_noise: step size h must be > 0");
  NoiseDraw nd;
  nd.dw.resize(m);
  nd.i10.resize(m);
  RandomStream rs(key);
  detail::sample_noise_into(rs, h, nd.dw, nd.i10);
  return nd;
}

/// Derives a fresh 64-bit seed from a base seed and two indices; used to
/// give sweep cells independent streams without sequential seeding.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  RandomStream rs(StreamKey{base, a, b, 0x5EEDULL});
  return rs.next_u64();
}

}  // namespace mvqmc
