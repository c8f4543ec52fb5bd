#pragma once

#include <concepts>
#include <cstdint>
#include <random>
#include <span>

namespace conesa {

/// Identifies one reproducible random stream. Equal seeds give bit-identical
/// draws.
struct RngSeed {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  friend bool operator==(const RngSeed&, const RngSeed&) = default;
};

/// Stream id of the index-th child of base. Children of distinct indices
/// (and of distinct parents) are decorrelated by a SplitMix64 finalizer.
inline RngSeed substream(const RngSeed& base, std::uint64_t index) {
  std::uint64_t z = base.stream + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return {base.seed, z ^ (z >> 31)};
}

/// Anything that can hand out standard normal draws.
template <class S>
concept NormalSource = requires(S& source, std::span<double> out) {
  { source.normal() } -> std::convertible_to<double>;
  source.fill_normal(out);
};

/// mt19937_64 seeded from (seed, stream) through std::seed_seq.
class Rng {
 public:
  explicit Rng(const RngSeed& seed) : engine_(make_engine(seed)) {}

  double normal() { return normal_(engine_); }

  void fill_normal(std::span<double> out) {
    for (double& v : out) v = normal_(engine_);
  }

  double uniform() { return std::generate_canonical<double, 64>(engine_); }

 private:
  static std::mt19937_64 make_engine(const RngSeed& seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed.seed), static_cast<std::uint32_t>(seed.seed >> 32),
                      static_cast<std::uint32_t>(seed.stream), static_cast<std::uint32_t>(seed.stream >> 32)};
    return std::mt19937_64(seq);
  }

  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

static_assert(NormalSource<Rng>);

}  // namespace conesa
