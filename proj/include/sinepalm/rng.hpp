#pragma once

// Reproducible random streams keyed by (master seed, stream id).

#include <cstdint>
#include <random>

namespace sinepalm {

struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;
};

class Rng {
 public:
  explicit Rng(SeedSpec seed);

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1].
  double uniform_open_low() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }
  double normal() { return normal_(engine_); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

/// A fresh seed from the operating system's entropy source.
std::uint64_t entropy_seed();

}  // namespace sinepalm
