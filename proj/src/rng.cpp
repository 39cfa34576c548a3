#include "sinepalm/rng.hpp"

namespace sinepalm {

namespace {

std::seed_seq make_seq(SeedSpec s) {
  return std::seed_seq{static_cast<std::uint32_t>(s.master_seed),
                       static_cast<std::uint32_t>(s.master_seed >> 32),
                       static_cast<std::uint32_t>(s.stream_id),
                       static_cast<std::uint32_t>(s.stream_id >> 32)};
}

}  // namespace

Rng::Rng(SeedSpec seed) {
  auto seq = make_seq(seed);
  engine_.seed(seq);
}

std::uint64_t entropy_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

}  // namespace sinepalm
