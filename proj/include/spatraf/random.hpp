#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace spatraf {

// SplitMix64 finalizer, used to derive independent child seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Named substreams of one drop. Fixing every stream but one lets a sweep vary
// a single ingredient of the realization (common random numbers).
enum class Substream : std::uint64_t {
  Layout = 1,
  Attractors = 2,
  Ues = 3,
  Beta = 4,
  Shadowing = 5,
  LosState = 6,
  Monte = 7,
};

// A reproducible random stream: identical (seed, stream_id) pairs yield
// identical sequences.
class RandomStream {
 public:
  using engine_type = std::mt19937_64;
  using result_type = engine_type::result_type;

  RandomStream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed), stream_id_(stream_id), engine_(mix64(seed ^ mix64(stream_id))) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  // Child stream for drop `drop` and component `which`.
  RandomStream substream(std::uint64_t drop, Substream which) const {
    return RandomStream(mix64(seed_ ^ mix64(stream_id_ + 0x51ed27ULL)),
                        mix64(drop * 16 + static_cast<std::uint64_t>(which)));
  }

  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double normal(double mean = 0.0, double stddev = 1.0) {
    return mean + stddev * std_normal_(engine_);
  }
  std::uint64_t poisson(double mean) {
    return std::poisson_distribution<std::uint64_t>(mean)(engine_);
  }

  static constexpr result_type min() { return engine_type::min(); }
  static constexpr result_type max() { return engine_type::max(); }
  result_type operator()() { return engine_(); }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  engine_type engine_;
  std::normal_distribution<double> std_normal_;
};

}  // namespace spatraf
