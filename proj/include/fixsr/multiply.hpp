#pragma once

#include <array>
#include <string>
#include <string_view>

#include "fixsr/format.hpp"
#include "fixsr/rounding.hpp"

namespace fixsr {

struct MulCase {
    FixedFormat lhs;
    FixedFormat rhs;
    FixedFormat out;

    // Fraction bits dropped when narrowing the exact product.
    constexpr int discard_bits() const { return lhs.frac_bits + rhs.frac_bits - out.frac_bits; }

    // "s1615xs1615"
    std::string name() const;
    static MulCase parse(std::string_view text);

    friend constexpr bool operator==(const MulCase&, const MulCase&) = default;
};

// The five 32-bit cases followed by their 16-bit analogues.
inline constexpr std::array<MulCase, 10> supported_mul_cases = {{
    {s16_15, s16_15, s16_15},
    {s16_15, s0_31, s16_15},
    {s16_15, u0_32, s16_15},
    {u0_32, u0_32, s0_31},
    {u0_32, s0_31, s0_31},
    {s8_7, s8_7, s8_7},
    {s8_7, s0_15, s8_7},
    {s8_7, u0_16, s8_7},
    {u0_16, u0_16, s0_15},
    {u0_16, s0_15, s0_15},
}};

/// Exact integer product of the two raw payloads (lhs.p + rhs.p fraction bits).
constexpr Wide exact_product(std::int64_t lhs_raw, std::int64_t rhs_raw) {
    return static_cast<Wide>(lhs_raw) * static_cast<Wide>(rhs_raw);
}

/**
 * Saturating mixed-format multiply. The full-width product is rounded once
 * into `mc.out` and then clamped. SR consumes one draw.
 */
FixedValue mul(const FixedValue& a, const FixedValue& b, const MulCase& mc, RoundingSpec spec,
               RandomStream* rng = nullptr, bool* saturated = nullptr);

/**
 * Unrounded sum of exact products. Terms with different fraction counts are
 * aligned upward, so accumulation never loses bits; overflow of the wide
 * intermediate throws.
 */
class Accumulator {
public:
    constexpr Accumulator() = default;
    constexpr Accumulator(Wide raw, int frac_bits) : raw_(raw), frac_bits_(frac_bits) {}

    static Accumulator of(const FixedValue& v) { return Accumulator(v.raw(), v.format().frac_bits); }

    constexpr Wide raw() const { return raw_; }
    constexpr int frac_bits() const { return frac_bits_; }
    double to_double() const;

    Accumulator& add(Wide raw, int frac_bits);

    /// Single final rounding into `out`, then saturation.
    FixedValue round_to(FixedFormat out, RoundingSpec spec, RandomStream* rng = nullptr,
                        bool* saturated = nullptr) const;

private:
    Wide raw_ = 0;
    int frac_bits_ = 0;
};

Accumulator mac(Accumulator acc, const FixedValue& a, const FixedValue& b);

}  // namespace fixsr
