#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace chaoslab {

// Deterministic random source. A stream is identified by (seed, index); the
// same pair plus the same call sequence yields bit-identical draws on every
// platform, because mt19937_64 and seed_seq are fully specified by the
// standard and all samplers below are written out explicitly (no
// implementation-defined std::*_distribution).
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t index);

  std::uint64_t next_u64();

  // Uniform on [0,1), 53-bit mantissa.
  double uniform01();

  // Uniform on {0, 1, ..., n-1}; unbiased via rejection. n >= 1.
  std::uint64_t uniform_below(std::uint64_t n);

  // Standard normal via Box-Muller; consumes exactly two uniforms per call.
  double normal();

  // Exponential with the given mean (mean > 0).
  double exponential(double mean);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t index() const { return index_; }

 private:
  std::uint64_t seed_;
  std::uint64_t index_;
  std::mt19937_64 engine_;
};

// Mixes structured ids (ladder cell, replica, purpose tag) into a single
// stream index, so replica-level parallelism never shares a stream.
std::uint64_t substream_index(std::initializer_list<std::uint64_t> parts);

}  // namespace chaoslab
