#include "fixsr/multiply.hpp"

#include <cmath>
#include <limits>

namespace fixsr {

namespace {

std::string compact(FixedFormat f) {
    std::string n = f.name();
    n.erase(n.find('.'), 1);
    return n;
}

constexpr Wide wide_max = static_cast<Wide>(~static_cast<unsigned __int128>(0) >> 1);

Wide checked_shift_left(Wide value, int shift) {
    if (shift == 0) return value;
    const Wide limit = wide_max >> shift;
    if (value > limit || value < -limit) throw std::overflow_error("accumulator alignment overflow");
    return value * (Wide{1} << shift);
}

}  // namespace

std::string MulCase::name() const { return compact(lhs) + "x" + compact(rhs); }

MulCase MulCase::parse(std::string_view text) {
    for (const auto& mc : supported_mul_cases) {
        if (mc.name() == text) return mc;
    }
    throw std::invalid_argument("unknown multiply case '" + std::string(text) + "'");
}

FixedValue mul(const FixedValue& a, const FixedValue& b, const MulCase& mc, RoundingSpec spec, RandomStream* rng,
               bool* saturated) {
    if (a.format() != mc.lhs || b.format() != mc.rhs) {
        throw std::invalid_argument("mul: operand formats do not match case " + mc.name());
    }
    const Wide product = exact_product(a.raw(), b.raw());
    const int d = mc.discard_bits();
    const Wide rounded = d >= 0 ? round_raw(product, d, spec, rng) : checked_shift_left(product, -d);
    return FixedValue::from_raw(saturate_raw(rounded, mc.out, saturated), mc.out);
}

double Accumulator::to_double() const { return std::ldexp(static_cast<double>(raw_), -frac_bits_); }

Accumulator& Accumulator::add(Wide raw, int frac_bits) {
    if (frac_bits > frac_bits_) {
        raw_ = checked_shift_left(raw_, frac_bits - frac_bits_);
        frac_bits_ = frac_bits;
    } else if (frac_bits < frac_bits_) {
        raw = checked_shift_left(raw, frac_bits_ - frac_bits);
    }
    Wide sum = 0;
    if (__builtin_add_overflow(raw_, raw, &sum)) throw std::overflow_error("accumulator overflow");
    raw_ = sum;
    return *this;
}

FixedValue Accumulator::round_to(FixedFormat out, RoundingSpec spec, RandomStream* rng, bool* saturated) const {
    const int d = frac_bits_ - out.frac_bits;
    const Wide rounded = d >= 0 ? round_raw(raw_, d, spec, rng) : checked_shift_left(raw_, -d);
    return FixedValue::from_raw(saturate_raw(rounded, out, saturated), out);
}

Accumulator mac(Accumulator acc, const FixedValue& a, const FixedValue& b) {
    acc.add(exact_product(a.raw(), b.raw()), a.format().frac_bits + b.format().frac_bits);
    return acc;
}

}  // namespace fixsr
