#pragma once

#include <cstdint>
#include <random>

namespace hoal {

// Seeded generator with a platform-independent uniform draw. std::mt19937_64 output
// is fixed by the standard; the distribution adaptors in <random> are not, so
// uniform() is derived from the raw bits here.
class Rng {
   public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

   private:
    std::mt19937_64 engine_;
};

}  // namespace hoal
