#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>

namespace rlsynth {

/// Deterministic random source. All sampling in the library goes through an
/// explicit Rng handed in by the caller; there is no hidden global state, so
/// two runs with the same seed produce identical results.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1).
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform index in [0, n). Multiply-shift keeps this branch-free and
  /// reproducible across platforms.
  std::size_t next_index(std::size_t n) {
    if (n == 0) throw std::invalid_argument("next_index: empty range");
    return static_cast<std::size_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  bool next_bool(double p_true) { return next_unit() < p_true; }

 private:
  std::mt19937_64 engine_;
};

/// Draws an index from a discrete distribution given as (anything, prob)
/// pairs. The weights are expected to sum to ~1; floating-point dust at the
/// end of the scan falls to the last entry.
template <class Pair>
std::size_t sample_discrete(std::span<const Pair> outcomes, Rng& rng) {
  if (outcomes.empty()) throw std::invalid_argument("sample_discrete: empty support");
  const double u = rng.next_unit();
  double cum = 0.0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    cum += outcomes[i].prob;
    if (u < cum) return i;
  }
  return outcomes.size() - 1;
}

}  // namespace rlsynth
