#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fixsr {

// Full-width exact intermediate. Every product of two 32-bit raw words, and
// short sums of such products, fit without loss.
using Wide = __int128;

/**
 * Fixed-point format <s,i,p> (signed) or <u,i,p> (unsigned).
 *
 *   signed:   word_len = i + p + 1, range [-2^i, 2^i - 2^-p]
 *   unsigned: word_len = i + p,     range [0, 2^i - 2^-p]
 *
 * The raw payload is a two's-complement integer; real value = raw * 2^-p.
 * Storage formats used by the library are 16 or 32 bits wide; narrower
 * formats are accepted for analysis (word_len in [1, 32]).
 */
struct FixedFormat {
    bool is_signed = true;
    int int_bits = 0;
    int frac_bits = 0;

    constexpr FixedFormat() = default;
    constexpr FixedFormat(bool s, int i, int p) : is_signed(s), int_bits(i), frac_bits(p) {
        if (i < 0 || p < 0 || word_len() < 1 || word_len() > 32) {
            throw std::invalid_argument("fixed-point format must have i, p >= 0 and 1 <= w <= 32");
        }
    }

    constexpr int word_len() const { return int_bits + frac_bits + (is_signed ? 1 : 0); }
    constexpr bool is_storage_format() const { return word_len() == 16 || word_len() == 32; }

    constexpr std::int64_t raw_min() const {
        return is_signed ? -(std::int64_t{1} << (word_len() - 1)) : 0;
    }
    constexpr std::int64_t raw_max() const {
        return is_signed ? (std::int64_t{1} << (word_len() - 1)) - 1
                         : (std::int64_t{1} << word_len()) - 1;
    }
    constexpr bool contains_raw(std::int64_t raw) const { return raw >= raw_min() && raw <= raw_max(); }

    // "s16.15", "u0.32"
    std::string name() const;
    // Accepts "s16.15", "u0.32", "s1615", "u032".
    static FixedFormat parse(std::string_view text);

    friend constexpr bool operator==(const FixedFormat&, const FixedFormat&) = default;
};

inline constexpr FixedFormat s16_15{true, 16, 15};  // accum
inline constexpr FixedFormat u0_32{false, 0, 32};   // unsigned long fract
inline constexpr FixedFormat s0_31{true, 0, 31};    // long fract
inline constexpr FixedFormat s8_7{true, 8, 7};      // short accum
inline constexpr FixedFormat u0_16{false, 0, 16};   // unsigned fract
inline constexpr FixedFormat s0_15{true, 0, 15};    // fract

/// Exact dyadic rational mantissa * 2^exponent.
struct Dyadic {
    Wide mantissa = 0;
    int exponent = 0;

    double to_double() const;
    Dyadic normalized() const;

    friend bool operator==(const Dyadic& a, const Dyadic& b);
    friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b);
};

struct Range {
    Dyadic min;
    Dyadic max;
};

Dyadic format_epsilon(FixedFormat format);
Range format_range(FixedFormat format);

/// Raw payload paired with its format. Immutable value type.
class FixedValue {
public:
    constexpr FixedValue() = default;

    static FixedValue from_raw(std::int64_t raw, FixedFormat format) {
        if (!format.contains_raw(raw)) {
            throw std::out_of_range("raw value does not fit in " + format.name());
        }
        return FixedValue(raw, format);
    }

    constexpr std::int64_t raw() const { return raw_; }
    constexpr FixedFormat format() const { return format_; }

    Dyadic exact() const { return Dyadic{raw_, -format_.frac_bits}; }

    friend constexpr bool operator==(const FixedValue&, const FixedValue&) = default;

private:
    constexpr FixedValue(std::int64_t raw, FixedFormat format) : raw_(raw), format_(format) {}

    std::int64_t raw_ = 0;
    FixedFormat format_{};
};

/// Clamp a wide integer into the raw range of `format`.
constexpr std::int64_t saturate_raw(Wide value, FixedFormat format, bool* saturated = nullptr) {
    if (value > format.raw_max()) {
        if (saturated) *saturated = true;
        return format.raw_max();
    }
    if (value < format.raw_min()) {
        if (saturated) *saturated = true;
        return format.raw_min();
    }
    return static_cast<std::int64_t>(value);
}

}  // namespace fixsr
