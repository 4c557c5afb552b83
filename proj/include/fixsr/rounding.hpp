#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "fixsr/format.hpp"
#include "fixsr/random.hpp"

namespace fixsr {

enum class RoundingMode { rd, rn, sr };

/**
 * RD  truncate the discarded bits (floor in two's complement).
 * RN  round to nearest, ties up: only the MSB of the discarded bits is read.
 * SR  round up with probability equal to the residual. The residual is cut
 *     to its top `sr_bits` bits (never rounded) and compared with an
 *     sr_bits-wide uniform draw; a nonzero residual whose top bits are all
 *     zero therefore always rounds down. sr_bits is clamped to the number of
 *     discarded bits, and to 32.
 */
struct RoundingSpec {
    static constexpr int full_width = 32;

    RoundingMode mode = RoundingMode::rn;
    int sr_bits = full_width;

    static constexpr RoundingSpec rd() { return {RoundingMode::rd, full_width}; }
    static constexpr RoundingSpec rn() { return {RoundingMode::rn, full_width}; }
    static constexpr RoundingSpec sr(int bits = full_width) { return {RoundingMode::sr, bits}; }

    constexpr bool is_stochastic() const { return mode == RoundingMode::sr; }

    // "rd", "rn", "sr", "sr6"
    std::string name() const;
    static RoundingSpec parse(std::string_view text);

    friend constexpr bool operator==(const RoundingSpec&, const RoundingSpec&) = default;
};

// Comparison width actually used for a `discard`-bit residual.
constexpr int effective_sr_bits(int sr_bits, int discard) {
    int k = sr_bits < discard ? sr_bits : discard;
    return k < RoundingSpec::full_width ? k : RoundingSpec::full_width;
}

constexpr Wide residual_mask(int bits) { return (Wide{1} << bits) - 1; }

// Comparator form: round up iff draw < top-k residual bits.
constexpr Wide sr_round_compare(Wide extended, int discard, int k, std::uint32_t draw) {
    const Wide floor = extended >> discard;
    const Wide top = (extended & residual_mask(discard)) >> (discard - k);
    return floor + (static_cast<Wide>(draw) < top ? 1 : 0);
}

// Adder form: add the k-bit complement of the draw below the kept bits and
// truncate. Carries out exactly when the comparator form rounds up.
constexpr Wide sr_round_add(Wide extended, int discard, int k, std::uint32_t draw) {
    const Wide kept = extended >> (discard - k);
    const Wide addend = residual_mask(k) - static_cast<Wide>(draw);
    return (kept + addend) >> k;
}

/**
 * Drops the bottom `discard` bits of an exact intermediate. Returns the
 * rounded quotient before any saturation. SR takes exactly one draw from
 * `rng` per call, whether or not the residual is zero.
 */
inline Wide round_raw(Wide extended, int discard, RoundingSpec spec, RandomStream* rng = nullptr) {
    if (discard < 0 || discard > 120) throw std::invalid_argument("round_raw: discard count out of range");
    if (spec.mode == RoundingMode::sr && rng == nullptr) {
        throw std::invalid_argument("round_raw: stochastic rounding needs a random stream");
    }
    if (discard == 0) {
        if (spec.mode == RoundingMode::sr) rng->next_u32();
        return extended;
    }
    switch (spec.mode) {
        case RoundingMode::rd:
            return extended >> discard;
        case RoundingMode::rn:
            return (extended + (Wide{1} << (discard - 1))) >> discard;
        case RoundingMode::sr: {
            if (spec.sr_bits < 1) throw std::invalid_argument("round_raw: sr_bits must be >= 1");
            const int k = effective_sr_bits(spec.sr_bits, discard);
            return sr_round_compare(extended, discard, k, rng->next_bits(k));
        }
    }
    return extended;
}

/// Nearest (RN), floor (RD) or stochastic (SR) grid point of x, saturated.
FixedValue from_real(double x, FixedFormat format, RoundingSpec spec, RandomStream* rng = nullptr,
                     bool* saturated = nullptr);

/// Exact: raw * 2^-p. Lossless in binary64 for w <= 32.
double to_real(const FixedValue& v);

/// Widening is exact; narrowing goes through round_raw and saturates.
FixedValue convert(const FixedValue& v, FixedFormat target, RoundingSpec spec, RandomStream* rng = nullptr,
                   bool* saturated = nullptr);

}  // namespace fixsr
