#ifndef ZONOSMOOTH_RNG_HPP_
#define ZONOSMOOTH_RNG_HPP_

#include <cstdint>

namespace zonosmooth::rng {

// SplitMix64 step; also used as the stream-derivation hash.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Counter-based 64-bit generator. Substreams for independent trials are
/// derived as hash(seed, stream), so trials can run concurrently and
/// reproducibly regardless of scheduling.
class Stream {
  public:
    Stream(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t s = seed ^ 0x6A09E667F3BCC909ull;
        splitmix64(s);
        s ^= stream * 0x9E3779B97F4A7C15ull + 0x3C6EF372FE94F82Bull;
        splitmix64(s);
        state_ = s;
    }

    std::uint64_t next_u64() { return splitmix64(state_); }

    /// Uniform double in [0, 1) with 53 random bits; platform-independent.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  private:
    std::uint64_t state_ = 0;
};

}  // namespace zonosmooth::rng

#endif
