#pragma once

#include <cstdint>
#include <random>

namespace bre {

/// Sub-stream purposes within a single replication.
enum class StreamPurpose : std::uint64_t {
    Data = 1,
    GroupAssignment = 2,
    ReferenceFit = 3,
    ComparisonFit = 4,
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Counter-based seed derivation: the seed for (condition, replication,
/// purpose) depends only on those counters and the master seed, never on the
/// order in which work units are executed.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t condition_index,
                          std::uint64_t rep_index, StreamPurpose purpose) noexcept;

/// Deterministic random stream. Normals come from a hand-rolled Box-Muller
/// transform so draws are bit-identical across standard library vendors
/// (std::normal_distribution is implementation-defined).
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on (0, 1), 53-bit resolution.
    double uniform();
    double normal();
    /// Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound);

private:
    std::mt19937_64 engine_;
    double cached_normal_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace bre
