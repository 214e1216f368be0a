#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace histlearn {

// splitmix64 finalizer: a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stream-split rule: a child seed is the parent folded with each coordinate
/// through mix64, in order. Cells of a grid derive their seeds from their own
/// coordinates, so results never depend on evaluation order.
constexpr std::uint64_t derive_seed(std::uint64_t parent,
                                    std::initializer_list<std::uint64_t> coords) {
  std::uint64_t h = mix64(parent);
  for (std::uint64_t c : coords) h = mix64(h ^ mix64(c + 0x632be59bd9b4e019ULL));
  return h;
}

/// Uniform double in [0, 1) from the top 53 bits.
constexpr double to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Counter-based generator: draw n of stream `key` is mix64(key ^ mix64(n)).
/// Satisfies UniformRandomBitGenerator so it plugs into <random>
/// distributions; `at()` gives random access for order-free draws.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit constexpr CounterRng(std::uint64_t key) : key_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type at(std::uint64_t counter) const {
    return mix64(key_ ^ mix64(counter));
  }
  constexpr result_type operator()() { return at(counter_++); }
  constexpr double uniform() { return to_unit((*this)()); }

  constexpr std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace histlearn
