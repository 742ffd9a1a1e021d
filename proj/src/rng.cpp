#include "janus/rng.hpp"

#include <cmath>
#include <numbers>

namespace janus {

CounterStream::CounterStream(std::uint64_t seed, std::uint64_t path, std::uint64_t step,
                             StreamPurpose purpose) noexcept {
    std::uint64_t k = splitmix64(seed);
    k = splitmix64(k ^ path);
    k = splitmix64(k ^ step);
    key_ = splitmix64(k ^ static_cast<std::uint64_t>(purpose));
}

std::uint64_t CounterStream::next_u64() noexcept {
    return splitmix64(key_ + 0xD1B54A32D192ED03ULL * ++counter_);
}

double CounterStream::uniform() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterStream::normal() noexcept {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(theta);
    has_cached_ = true;
    return r * std::cos(theta);
}

}  // namespace janus
