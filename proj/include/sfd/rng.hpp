#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <utility>

namespace sfd {

/// 64-bit seed. Same seed with same parameters gives bit-identical output on
/// every platform.
struct Seed {
    std::uint64_t value = 0;

    constexpr Seed() = default;
    constexpr explicit Seed(std::uint64_t v) : value(v) {}

    /// Derived seed for replicate / stream `index`.
    [[nodiscard]] constexpr Seed offset(std::uint64_t index) const { return Seed{value + index}; }

    friend constexpr bool operator==(Seed, Seed) = default;
};

/// SplitMix64 step. Used to expand a 64-bit seed into generator state and as a
/// general-purpose bit mixer.
constexpr std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t mix64(std::uint64_t x) {
    std::uint64_t s = x;
    return splitmix64(s);
}

/// xoshiro256** (Blackman & Vigna), seeded through SplitMix64.
///
/// All draws (uniform reals, bounded integers, shuffles) are implemented here
/// rather than through <random> distributions, whose output is
/// implementation-defined.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(Seed seed) {
        std::uint64_t sm = seed.value;
        for (auto& word : state_) word = splitmix64(sm);
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform integer on [0, bound), bound > 0 (Lemire's nearly-divisionless method).
    std::uint64_t below(std::uint64_t bound) {
        __uint128_t m = static_cast<__uint128_t>((*this)()) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                m = static_cast<__uint128_t>((*this)()) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Two distinct indices on [0, bound), bound >= 2.
    std::pair<std::size_t, std::size_t> distinct_pair(std::size_t bound) {
        const auto a = static_cast<std::size_t>(below(bound));
        auto b = static_cast<std::size_t>(below(bound - 1));
        if (b >= a) ++b;
        return {a, b};
    }

    /// Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::span<T> items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t state_[4]{};
};

}  // namespace sfd
