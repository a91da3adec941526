#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace synfact {

/// SplitMix64 finalizer; mixes a 64-bit value into a well-distributed one.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent stream seed from a run seed and a key.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view key) noexcept;

/// Portable seeded generator.
///
/// The raw stream is std::mt19937_64, whose output sequence is fixed by the
/// C++ standard. Bounded draws use rejection sampling on top of it instead of
/// std::uniform_int_distribution, whose algorithm is implementation-defined,
/// so identical seeds give identical samples on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). `bound` must be > 0.
  std::uint64_t below(std::uint64_t bound);

  /// Uniform integer in [lo, hi], inclusive.
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo + 1); }

  /// k distinct indices from [0, n), sorted ascending (partial Fisher-Yates).
  std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k);

 private:
  std::mt19937_64 engine_;
};

}  // namespace synfact
