#include "fixsr/rounding.hpp"

#include <charconv>
#include <cmath>

namespace fixsr {

std::string RoundingSpec::name() const {
    switch (mode) {
        case RoundingMode::rd: return "rd";
        case RoundingMode::rn: return "rn";
        case RoundingMode::sr: return sr_bits >= full_width ? "sr" : "sr" + std::to_string(sr_bits);
    }
    return "?";
}

RoundingSpec RoundingSpec::parse(std::string_view text) {
    if (text == "rd" || text == "RD") return rd();
    if (text == "rn" || text == "RN") return rn();
    if (text.starts_with("sr") || text.starts_with("SR")) {
        std::string_view rest = text.substr(2);
        if (rest.starts_with(":")) rest.remove_prefix(1);
        if (rest.empty()) return sr();
        int bits = 0;
        const auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), bits);
        if (ec == std::errc{} && ptr == rest.data() + rest.size() && bits >= 1 && bits <= full_width) {
            return sr(bits);
        }
    }
    throw std::invalid_argument("unknown rounding mode '" + std::string(text) + "'");
}

FixedValue from_real(double x, FixedFormat format, RoundingSpec spec, RandomStream* rng, bool* saturated) {
    if (!std::isfinite(x)) throw std::domain_error("from_real: input must be finite");
    // Anything beyond twice the range saturates identically; clamping keeps
    // the scaled integer part inside 64 bits.
    const double limit = std::ldexp(1.0, format.int_bits + 1);
    if (x > limit) x = limit;
    if (x < -limit) x = -limit;

    constexpr int guard = 64;
    const double scaled = std::ldexp(x, format.frac_bits);
    const double whole = std::floor(scaled);
    const double frac = scaled - whole;  // exact, in [0, 1)
    const auto low = static_cast<std::uint64_t>(std::ldexp(frac, guard));
    const Wide extended = (static_cast<Wide>(static_cast<std::int64_t>(whole)) << guard) + static_cast<Wide>(low);

    const Wide rounded = round_raw(extended, guard, spec, rng);
    return FixedValue::from_raw(saturate_raw(rounded, format, saturated), format);
}

double to_real(const FixedValue& v) { return std::ldexp(static_cast<double>(v.raw()), -v.format().frac_bits); }

FixedValue convert(const FixedValue& v, FixedFormat target, RoundingSpec spec, RandomStream* rng, bool* saturated) {
    const int shift = v.format().frac_bits - target.frac_bits;
    Wide extended = v.raw();
    if (shift <= 0) {
        extended <<= -shift;
    } else {
        extended = round_raw(extended, shift, spec, rng);
    }
    return FixedValue::from_raw(saturate_raw(extended, target, saturated), target);
}

}  // namespace fixsr
