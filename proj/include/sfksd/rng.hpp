#pragma once

#include <cstdint>
#include <random>

namespace sfksd {

/// Reproducible random stream identified by (master_seed, stream_id).
/// Only the raw 64-bit engine output is consumed; every variate below is
/// derived by code in this file, so sequences match across platforms.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

    std::uint64_t master_seed() const noexcept { return master_seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }

    std::uint64_t next_u64() { return engine_(); }
    /// Uniform on the open interval (0, 1).
    double uniform();
    double normal();
    double exponential(double rate);
    /// Gamma(shape, 1).
    double gamma(double shape);
    /// +1 or -1 with equal probability.
    double rademacher() { return (engine_() >> 63) ? 1.0 : -1.0; }

    /// An independent child stream, e.g. per trial or per bootstrap draw.
    RngStream substream(std::uint64_t id) const;

private:
    std::uint64_t master_seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

/// SplitMix64 finaliser, used to derive seeds.
std::uint64_t mix64(std::uint64_t x);

}  // namespace sfksd
