#ifndef CSB_RNG_H_
#define CSB_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace csb {

// Seedable, splittable random source. The engine is std::mt19937_64; child
// streams are keyed by SplitMix64 over (seed, stream id) so that two streams
// derived from the same seed never share state. Floating-point draws are built
// from raw 64-bit outputs, so sequences are identical across standard
// libraries.
class Rng {
 public:
  static constexpr std::string_view kAlgorithm = "mt19937_64+splitmix64";

  explicit Rng(std::uint64_t seed);

  // Independent stream derived from this stream's seed (not its state).
  Rng Split(std::uint64_t stream_id) const;

  std::uint64_t seed() const { return seed_; }

  std::uint64_t NextU64() { return engine_(); }
  // Uniform in [0, 1) with 53 bits of resolution.
  double Uniform();
  bool Bernoulli(double p) { return Uniform() < p; }
  // Uniform integer in [0, n), n > 0, without modulo bias.
  std::uint64_t UniformInt(std::uint64_t n);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

std::uint64_t SplitMix64(std::uint64_t x);

}  // namespace csb

#endif  // CSB_RNG_H_
