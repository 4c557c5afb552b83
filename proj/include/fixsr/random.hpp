#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fixsr {

enum class PrngKind { kiss99, lfsr33, ranqd1 };

std::string_view to_string(PrngKind kind);
PrngKind parse_prng_kind(std::string_view text);

/**
 * Fibonacci LFSR over `Width` bits with taps at bit positions Width and Tap
 * (1-indexed from the least significant end). Each clock shifts left and
 * inserts bit(Width) ^ bit(Tap) at the bottom.
 */
template <int Width, int Tap>
class FibonacciLfsr {
    static_assert(Width > Tap && Tap > 0 && Width <= 63);

public:
    static constexpr std::uint64_t mask = (std::uint64_t{1} << Width) - 1;
    // Bits that can be produced per clock without reading freshly inserted bits.
    static constexpr int max_block = Width - Tap;

    constexpr explicit FibonacciLfsr(std::uint64_t state) : state_(state & mask) {
        if (state_ == 0) throw std::invalid_argument("LFSR state must be nonzero");
    }

    constexpr void step() {
        const std::uint64_t bit = ((state_ >> (Width - 1)) ^ (state_ >> (Tap - 1))) & 1u;
        state_ = ((state_ << 1) | bit) & mask;
    }

    // Equivalent to `bits` calls of step(); bits <= max_block.
    constexpr void clock_block(int bits) {
        const std::uint64_t fresh =
            ((state_ >> (Width - bits)) ^ (state_ >> (Tap - bits))) & ((std::uint64_t{1} << bits) - 1);
        state_ = ((state_ << bits) | fresh) & mask;
    }

    constexpr void clock(int bits) {
        while (bits > 0) {
            const int n = bits < max_block ? bits : max_block;
            clock_block(n);
            bits -= n;
        }
    }

    constexpr std::uint64_t state() const { return state_; }

private:
    std::uint64_t state_;
};

using Lfsr33 = FibonacciLfsr<33, 20>;

/**
 * Seeded deterministic uniform source. Output sequences depend only on
 * (kind, seed words) and are identical on every platform.
 *
 *   KISS99  Marsaglia's combination of two 16-bit multiply-with-carry
 *           generators, a 3-shift xorshift and a 69069 congruential generator.
 *           State words: z, w, jsr, jcong.
 *   LFSR33  33-bit maximal-length register, taps 33 and 20; each word is the
 *           register's low 32 bits after 32 clocks.
 *   RANQD1  state = 1664525 * state + 1013904223 (mod 2^32).
 */
class RandomStream {
public:
    static constexpr std::uint32_t kiss99_default_seed[4] = {362436069u, 521288629u, 123456789u, 380116160u};

    static RandomStream seeded(PrngKind kind, std::span<const std::uint32_t> words);
    // Expands a single integer into a valid state with splitmix64.
    static RandomStream from_seed(PrngKind kind, std::uint64_t seed);

    PrngKind kind() const { return kind_; }
    std::uint64_t draws_made() const { return draws_; }

    std::uint32_t next_u32() {
        ++draws_;
        switch (kind_) {
            case PrngKind::kiss99: {
                z_ = 36969u * (z_ & 65535u) + (z_ >> 16);
                w_ = 18000u * (w_ & 65535u) + (w_ >> 16);
                const std::uint32_t mwc = (z_ << 16) + w_;
                jcong_ = 69069u * jcong_ + 1234567u;
                jsr_ ^= jsr_ << 17;
                jsr_ ^= jsr_ >> 13;
                jsr_ ^= jsr_ << 5;
                return (mwc ^ jcong_) + jsr_;
            }
            case PrngKind::lfsr33:
                lfsr_.clock(32);
                return static_cast<std::uint32_t>(lfsr_.state());
            case PrngKind::ranqd1:
                z_ = 1664525u * z_ + 1013904223u;
                return z_;
        }
        return 0;
    }

    // Top k bits of the next word (the high bits are the strong ones for the LCG).
    std::uint32_t next_bits(int k) {
        if (k < 1 || k > 32) throw std::invalid_argument("next_bits: k must be in [1, 32]");
        return next_u32() >> (32 - k);
    }

    // Open interval (0, 1).
    double next_uniform() { return (static_cast<double>(next_u32()) + 0.5) * 0x1p-32; }

    // Standard normal variate, Box-Muller transform of two uniforms.
    double next_gaussian();

private:
    RandomStream(PrngKind kind) : kind_(kind) {}

    PrngKind kind_;
    std::uint32_t z_ = 0;
    std::uint32_t w_ = 0;
    std::uint32_t jsr_ = 0;
    std::uint32_t jcong_ = 0;
    Lfsr33 lfsr_{1};
    std::uint64_t draws_ = 0;
};

/// Parses decimal or 0x-prefixed hexadecimal seed strings.
std::uint64_t parse_seed(std::string_view text);

}  // namespace fixsr
