#pragma once

#include <cstdint>
#include <random>

namespace uavloc {

namespace detail {

// SplitMix64 finalizer; decorrelates sequential stream ids.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

}  // namespace detail

/// Independent engine for stream `stream_id` of a master seed. Trials draw
/// from their own substream, so results do not depend on execution order.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream_id) {
    return std::mt19937_64(detail::splitmix64(seed ^ detail::splitmix64(stream_id)));
}

}  // namespace uavloc
