#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace epiassim {

/// Counter-based random stream.
///
/// The k-th output is a SplitMix64 finaliser applied to `key + k * gamma`, so a
/// stream is fully determined by its key and any draw can be reproduced without
/// replaying shared state. Keys are derived from a seed and a path of integers
/// (step, purpose, member, ...), which lets concurrent workers own independent
/// streams and keeps results independent of scheduling.
class RandomStream {
public:
    using result_type = std::uint64_t;

    explicit RandomStream(std::uint64_t key) : key_(key) {}

    static RandomStream derive(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    double uniform(double lo, double hi);
    double normal(double mean, double stddev);

    std::uint64_t key() const { return key_; }
    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x);

/// What a block of draws is used for; part of every derived stream key.
enum class Purpose : std::uint64_t {
    InitialEnsemble = 1,
    ProcessNoise = 2,
    ParameterDrift = 3,
    ObservationPerturbation = 4,
    DataNoise = 5,
    Replicate = 6,
};

/// Streams for one filter step and purpose, indexed by ensemble member.
struct MemberStreams {
    std::uint64_t seed = 0;
    std::uint64_t step = 0;
    Purpose purpose = Purpose::ProcessNoise;

    RandomStream for_member(std::size_t member) const
    {
        return RandomStream::derive(seed, {step, static_cast<std::uint64_t>(purpose), member});
    }
};

}  // namespace epiassim
