#pragma once

#include <array>
#include <cstdint>

namespace fsoacq {

/// Counter-based splittable random stream (Philox4x32-10).
///
/// A stream is addressed by (seed, op, trial): the seed keys the generator,
/// the (op, trial) pair selects an independent stream. Draws within a stream
/// are sequential, but streams never interact, so Monte Carlo trials can be
/// evaluated in any order or split across workers and still produce
/// bit-identical results.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint32_t op, std::uint32_t trial);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  /// Uniform double in [0, 1), 53-bit resolution.
  double uniform();

  /// Standard normal via Box-Muller (two uniforms per call, no caching).
  double normal();

  /// Exponential with the given mean (mean > 0).
  double exponential(double mean);

  /// Poisson with the given mean (exact for all means >= 0):
  /// Knuth product method below mean 10, Hormann PTRS rejection above.
  std::int64_t poisson(double mean);

  /// Number of failures before the first success when each trial fails
  /// with probability p, p in [0, 1).
  std::int64_t geometric_failures(double p);

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> ctr_;
  std::array<std::uint32_t, 4> buf_;
  int buf_pos_;
};

}  // namespace fsoacq
