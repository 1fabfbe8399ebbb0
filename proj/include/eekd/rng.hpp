#ifndef EEKD_RNG_HPP
#define EEKD_RNG_HPP

#include <cstdint>

namespace eekd {

/**
 * SplitMix64 generator. The bit stream is fixed so that datasets, weight
 * initializations and batch orders are reproducible from any language.
 *
 *   uniform()  = (next() >> 11) * 2^-53            in [0, 1)
 *   normal()   = sqrt(-2 ln(1 - u1)) * cos(2 pi u2) (two uniforms per draw)
 */
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

/// Independent sub-stream seed for (base, stream), e.g. per-epoch shuffles.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace eekd

#endif  // EEKD_RNG_HPP
