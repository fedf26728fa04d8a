#pragma once

#include <cstdint>
#include <limits>

namespace dcmrank {

namespace detail {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

//! Stafford variant 13 finalizer (bijective 64-bit mixer).
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

} // namespace detail

/**
 * Counter-based random stream.
 *
 * The i-th output is a keyed bijection of i, so a stream is fully described by
 * (key, counter) and child streams are derived by hashing the parent key with
 * an index. Replications that each own a split() stream are reproducible
 * bit-for-bit from one master seed regardless of scheduling.
 *
 * Satisfies UniformRandomBitGenerator.
 */
class RandomStream {
public:
    using result_type = std::uint64_t;

    explicit constexpr RandomStream(std::uint64_t seed) noexcept
        : key_(detail::mix64(seed + detail::kGolden)) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept {
        const std::uint64_t x = detail::mix64(key_ ^ (counter_++ * detail::kGolden));
        return detail::mix64(x + key_);
    }

    //! Independent child stream number `index`; does not advance this stream.
    [[nodiscard]] constexpr RandomStream split(std::uint64_t index) const noexcept {
        RandomStream child(0);
        child.key_ = detail::mix64(detail::mix64(key_ + 0x632BE59BD9B4E019ULL) ^
                                   detail::mix64(index + detail::kGolden));
        return child;
    }

    //! Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    //! Uniform on (0, 1).
    double uniform_open() noexcept {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

    //! Uniform integer on [0, bound) by Lemire's nearly-divisionless method.
    std::uint64_t below(std::uint64_t bound) noexcept {
        unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                m = static_cast<unsigned __int128>((*this)()) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    [[nodiscard]] constexpr std::uint64_t key() const noexcept { return key_; }
    [[nodiscard]] constexpr std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace dcmrank
