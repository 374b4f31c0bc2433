#pragma once

#include <array>
#include <cstdint>
#include <random>

namespace maj3 {

// Seedable stream over std::mt19937_64. Bounded draws are implemented here
// rather than with std::uniform_int_distribution so that a (seed, stream) pair
// produces the same sequence on every standard library.
class rng {
public:
    explicit rng(std::uint64_t seed) : rng(seed, 0) {}

    rng(std::uint64_t seed, std::uint64_t stream) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream),
                          static_cast<std::uint32_t>(stream >> 32)};
        engine_.seed(seq);
    }

    std::uint64_t next() { return engine_(); }

    // Uniform in [0, bound), bound >= 1: ceil(log2 bound) bits from the
    // buffered stream, rejected until below bound. Small bounds, which the
    // algorithms draw constantly, use a few bits of a 64-bit output each.
    std::uint64_t below(std::uint64_t bound) {
        if (bound <= 1) return 0;
        const int width = 64 - __builtin_clzll(bound - 1);
        std::uint64_t r;
        do {
            r = take(width);
        } while (r >= bound);
        return r;
    }

    int bit() { return static_cast<int>(take(1)); }

    // Uniform permutation of {0,1,2}.
    std::array<int, 3> permutation3() {
        static constexpr std::array<std::array<int, 3>, 6> perms{{
            {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0},
        }};
        return perms[below(6)];
    }

private:
    std::uint64_t take(int width) {
        if (width == 64) return engine_();
        if (available_ < width) {
            buffer_ = engine_();
            available_ = 64;
        }
        const std::uint64_t r = buffer_ & ((std::uint64_t{1} << width) - 1);
        buffer_ >>= width;
        available_ -= width;
        return r;
    }

    std::mt19937_64 engine_;
    std::uint64_t buffer_ = 0;
    int available_ = 0;
};

}  // namespace maj3
