#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace qflo {

/// Exclusive per-caller random stream. Uniform reals use the top 53 bits of
/// the engine output so the sequence is identical on every platform.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  private:
    std::mt19937_64 engine_;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Counter-based seed splitting: the seed for a work item depends only on the
/// master seed and the item's coordinates, never on execution order.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept;

/// Nonzero seed from std::random_device.
std::uint64_t entropy_seed();

} // namespace qflo
