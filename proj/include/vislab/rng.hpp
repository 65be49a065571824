#pragma once

#include <array>
#include <cstdint>

#include "vislab/vect.hpp"

namespace vislab {

/// Counter-based random stream (Philox4x32-10).
///
/// The key is the 64-bit seed, the upper half of the 128-bit counter is the
/// stream index and the lower half counts blocks drawn so far. Distinct
/// (seed, stream_index) pairs therefore never share a counter value, and the
/// same pair reproduces the same sequence on every platform. A stream is owned
/// by one task; fan-out happens only through substream().
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_index);

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_index() const noexcept { return stream_; }

    /// Stream with the same seed and an index derived from (stream_index, child).
    RngStream substream(std::uint64_t child) const;

    std::uint32_t next_u32();
    std::uint64_t next_u64();

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Uniform on (0, 1].
    double uniform_pos() { return 1.0 - uniform(); }
    double gaussian();
    /// Exact Poisson variate (product method below mean 12, PTRS rejection above).
    std::uint64_t poisson(double mean);
    /// Uniform point on the unit sphere S^{n-1} in R^n.
    Vect unit_sphere(int n);

private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int used_ = 4;
    double spare_gaussian_ = 0.0;
    bool has_spare_ = false;
};

/// Finalizer of splitmix64; used to derive child stream indices.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// One Philox4x32-10 block.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key) noexcept;

}  // namespace vislab
