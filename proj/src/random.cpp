#include "epiassim/random.hpp"

#include <random>

namespace epiassim {

namespace {
constexpr std::uint64_t golden_gamma = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t mix64(std::uint64_t x)
{
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

RandomStream RandomStream::derive(std::uint64_t seed, std::initializer_list<std::uint64_t> path)
{
    std::uint64_t key = mix64(seed + golden_gamma);
    for (const std::uint64_t p : path) key = mix64(key ^ mix64(p + golden_gamma));
    return RandomStream(key);
}

RandomStream::result_type RandomStream::operator()()
{
    return mix64(key_ + (++counter_) * golden_gamma);
}

double RandomStream::uniform(double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(*this);
}

double RandomStream::normal(double mean, double stddev)
{
    if (stddev == 0.0) return mean;
    return std::normal_distribution<double>(mean, stddev)(*this);
}

}  // namespace epiassim
