#pragma once

// Counter-based PRNG keyed by (seed, stream). Each draw hashes
// base + counter with the splitmix64 finaliser, so child streams derived
// with distinct stream ids are independent and order-insensitive.
// Gaussian draws use Box-Muller (frozen transform, both values consumed).

#include <cstdint>

namespace dropgp {

class RngState {
public:
    RngState(std::uint64_t seed, std::uint64_t stream = 0);

    // New state for a sub-computation; deterministic in (this->seed, substream).
    RngState child(std::uint64_t substream) const;

    std::uint64_t next_u64();
    double next_uniform();   // [0, 1)
    double next_gaussian();  // N(0, 1)

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t base_;
    std::uint64_t counter_ = 0;
    double cached_gaussian_ = 0.0;
    bool has_cached_ = false;
};

} // namespace dropgp
