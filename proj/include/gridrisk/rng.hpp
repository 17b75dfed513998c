#pragma once

#include <cstdint>
#include <random>

namespace gridrisk {

/// One uniform stream per (master seed, stream index) pair. Batch code gives
/// every sample its own stream, so results do not depend on worker count or
/// scheduling order.
class SampleRng {
public:
    SampleRng(std::uint64_t master_seed, std::uint64_t stream_index) {
        std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                          static_cast<std::uint32_t>(master_seed >> 32),
                          static_cast<std::uint32_t>(stream_index),
                          static_cast<std::uint32_t>(stream_index >> 32)};
        gen_.seed(seq);
    }

    /// Uniform on [0,1) with 53-bit resolution. Built from raw engine output
    /// so the value sequence is pinned by the mt19937_64 standard, not by a
    /// library's distribution implementation.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    std::uint64_t raw() { return gen_(); }

private:
    std::mt19937_64 gen_;
};

}  // namespace gridrisk
