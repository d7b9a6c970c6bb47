#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace rembo {

/// Counter-based pseudo random stream (splitmix64 over a keyed counter).
///
/// The n-th draw depends only on (seed, stream, n), so two generators built
/// from the same key produce identical sequences on every platform. Normal
/// deviates use Box-Muller rather than std::normal_distribution, whose output
/// is implementation defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t next_u64();
    /// Uniform in [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi);
    double normal();
    /// Uniform integer in [0, n).
    std::size_t below(std::size_t n);

    std::uint64_t draws() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Derives an independent seed for a named sub-stream.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag, std::uint64_t index = 0);

}  // namespace rembo
