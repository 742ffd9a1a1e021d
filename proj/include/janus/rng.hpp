#pragma once

#include <cstdint>

namespace janus {

// Draw-site tags. Each (seed, path, step, purpose) tuple owns an independent
// stream, so adding a new purpose never shifts the draws of existing ones.
enum class StreamPurpose : std::uint64_t {
    AssetShocks = 1,
    DemandNoise = 2,
    AlphaMarketNoise = 3,
    OmegaMarketNoise = 4,
    Test = 99,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Counter-based stream: the n-th output is a pure function of the key and n.
class CounterStream {
public:
    CounterStream(std::uint64_t seed, std::uint64_t path, std::uint64_t step,
                  StreamPurpose purpose) noexcept;

    std::uint64_t next_u64() noexcept;
    // Uniform on the open interval (0, 1).
    double uniform() noexcept;
    // Standard normal via Box-Muller; pairs are cached.
    double normal() noexcept;

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace janus
