#pragma once

#include <cstdint>
#include <limits>

namespace reinsure {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Counter-based random stream. Output i of stream (seed, id, tag) is a pure
// function of those four integers, so path k draws the same numbers whether it
// is simulated first, last, or on another thread.
class Stream {
public:
    using result_type = std::uint64_t;

    Stream(std::uint64_t seed, std::uint64_t id, std::uint64_t tag = 0) noexcept
        : key_(mix64(mix64(mix64(seed) ^ id) + tag)) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept { return mix64(key_ + (++counter_) * 0xd1b54a32d192ed03ULL); }

    // Uniform on (0, 1]; never returns 0 so -log(uniform()) is finite.
    double uniform() noexcept { return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53; }

    std::uint64_t draws() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace reinsure
