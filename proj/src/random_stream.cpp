#include "chaoslab/random_stream.hpp"

#include <cmath>

#include "chaoslab/errors.hpp"

namespace chaoslab {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t index)
    : seed_(seed), index_(index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffULL),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index & 0xffffffffULL),
                    static_cast<std::uint32_t>(index >> 32)};
  engine_.seed(seq);
}

std::uint64_t RandomStream::next_u64() { return engine_(); }

double RandomStream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t RandomStream::uniform_below(std::uint64_t n) {
  if (n == 0) throw InvalidInputError("uniform_below: n must be >= 1");
  if (n == 1) return 0;
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  for (;;) {
    const std::uint64_t x = next_u64();
    if (x < limit) return x % n;
  }
}

double RandomStream::normal() {
  // 1 - u keeps the log argument in (0,1].
  const double u = 1.0 - uniform01();
  const double v = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u));
  return r * std::cos(2.0 * M_PI * v);
}

double RandomStream::exponential(double mean) {
  if (!(mean > 0.0)) throw InvalidInputError("exponential: mean must be > 0");
  return -mean * std::log1p(-uniform01());
}

std::uint64_t substream_index(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t state = 0x6a09e667f3bcc908ULL;
  std::uint64_t acc = 0;
  for (std::uint64_t p : parts) {
    state ^= p;
    acc = splitmix64(state) ^ (acc * 0x100000001b3ULL);
  }
  return acc;
}

}  // namespace chaoslab
