#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace ipp {

/// Philox4x32-10 block function (Salmon, Moraes, Dror, Shaw; "Parallel random
/// numbers: as easy as 1, 2, 3", SC'11). Counter-based: the output is a pure
/// function of (counter, key), which is what makes stream splitting trivial.
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter generate(Counter counter, Key key) noexcept;
};

/// Reproducible random stream built on Philox4x32-10.
///
/// The 64-bit seed is the Philox key. The 128-bit counter is split into a
/// 64-bit stream id (high half) and a 64-bit draw index (low half), so
/// distinct streams never share a counter value. `substream(id)` derives a
/// child stream id by hashing (parent stream, id) with the splitmix64
/// finalizer; draws from a child do not advance the parent.
///
/// Floating point draws are built only from integer arithmetic plus the
/// normal quantile in normal.hpp, so the sequence is identical across
/// platforms and standard libraries.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

    [[nodiscard]] Rng substream(std::uint64_t id) const noexcept;

    std::uint64_t next_u64() noexcept;
    result_type operator()() noexcept { return next_u64(); }
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform() noexcept;
    /// Uniform on (lo, hi).
    double uniform(double lo, double hi) noexcept;
    /// Standard normal by inversion.
    double normal() noexcept;

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream() const noexcept { return stream_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t index_ = 0;
    std::uint64_t buffered_ = 0;
    bool has_buffered_ = false;
};

/// splitmix64 finalizer; used for deriving stream ids and sub-seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace ipp
