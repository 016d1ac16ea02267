#include "fsoacq/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fsoacq {
namespace {

constexpr std::uint32_t kPhiloxW32A = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW32B = 0xBB67AE85u;
constexpr std::uint32_t kPhiloxM4x32A = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM4x32B = 0xCD9E8D57u;

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline void philox_round(std::array<std::uint32_t, 4>& x,
                         const std::array<std::uint32_t, 2>& k) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM4x32A) * x[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM4x32B) * x[2];
  const std::uint32_t h0 = static_cast<std::uint32_t>(p0 >> 32);
  const std::uint32_t l0 = static_cast<std::uint32_t>(p0);
  const std::uint32_t h1 = static_cast<std::uint32_t>(p1 >> 32);
  const std::uint32_t l1 = static_cast<std::uint32_t>(p1);
  x = {h1 ^ x[1] ^ k[0], l1, h0 ^ x[3] ^ k[1], l0};
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint32_t op, std::uint32_t trial)
    : buf_pos_(4) {
  std::uint64_t s = seed;
  const std::uint64_t k = splitmix64(s);
  key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
  ctr_ = {0u, 0u, trial, op};
}

void RngStream::refill() {
  std::array<std::uint32_t, 4> x = ctr_;
  std::array<std::uint32_t, 2> k = key_;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kPhiloxW32A;
      k[1] += kPhiloxW32B;
    }
    philox_round(x, k);
  }
  buf_ = x;
  buf_pos_ = 0;
  if (++ctr_[0] == 0u) ++ctr_[1];
}

std::uint32_t RngStream::next_u32() {
  if (buf_pos_ >= 4) refill();
  return buf_[buf_pos_++];
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t lo = next_u32();
  const std::uint64_t hi = next_u32();
  return (hi << 32) | lo;
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

double RngStream::exponential(double mean) {
  if (!(mean > 0.0)) throw std::invalid_argument("exponential: mean must be > 0");
  return -mean * std::log(1.0 - uniform());
}

std::int64_t RngStream::poisson(double mean) {
  if (!(mean >= 0.0)) throw std::invalid_argument("poisson: mean must be >= 0");
  if (mean == 0.0) return 0;
  if (mean < 10.0) {
    // Knuth: count uniforms until their product drops below exp(-mean).
    const double limit = std::exp(-mean);
    std::int64_t k = 0;
    double prod = uniform();
    while (prod > limit) {
      ++k;
      prod *= uniform();
    }
    return k;
  }
  // Hormann's PTRS transformed rejection, exact for mean >= 10.
  const double log_mean = std::log(mean);
  const double b = 0.931 + 2.53 * std::sqrt(mean);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = uniform() - 0.5;
    const double v = uniform();
    const double u_shifted = 0.5 - std::abs(u);
    const double k_real =
        std::floor((2.0 * a / u_shifted + b) * u + mean + 0.43);
    if (u_shifted >= 0.07 && v <= v_r) return static_cast<std::int64_t>(k_real);
    if (k_real < 0.0 || (u_shifted < 0.013 && v > u_shifted)) continue;
    const double lhs =
        std::log(v * inv_alpha / (a / (u_shifted * u_shifted) + b));
    const double rhs =
        -mean + k_real * log_mean - std::lgamma(k_real + 1.0);
    if (lhs <= rhs) return static_cast<std::int64_t>(k_real);
  }
}

std::int64_t RngStream::geometric_failures(double p) {
  if (!(p >= 0.0 && p < 1.0))
    throw std::invalid_argument("geometric_failures: p must be in [0, 1)");
  if (p == 0.0) return 0;
  const double u = 1.0 - uniform();  // (0, 1]
  return static_cast<std::int64_t>(std::floor(std::log(u) / std::log(p)));
}

}  // namespace fsoacq
