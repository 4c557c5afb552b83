#include "fixsr/format.hpp"

#include <cmath>
#include <cstdlib>

namespace fixsr {

std::string FixedFormat::name() const {
    return std::string(is_signed ? "s" : "u") + std::to_string(int_bits) + "." + std::to_string(frac_bits);
}

FixedFormat FixedFormat::parse(std::string_view text) {
    auto fail = [&]() -> FixedFormat {
        throw std::invalid_argument("unrecognised fixed-point format '" + std::string(text) + "'");
    };
    if (text.size() < 2 || (text[0] != 's' && text[0] != 'u')) return fail();
    const bool is_signed = text[0] == 's';
    std::string_view body = text.substr(1);
    int i = 0;
    int p = 0;
    if (auto dot = body.find('.'); dot != std::string_view::npos) {
        const std::string ip(body.substr(0, dot));
        const std::string pp(body.substr(dot + 1));
        if (ip.empty() || pp.empty()) return fail();
        char* end = nullptr;
        i = static_cast<int>(std::strtol(ip.c_str(), &end, 10));
        if (*end != '\0') return fail();
        p = static_cast<int>(std::strtol(pp.c_str(), &end, 10));
        if (*end != '\0') return fail();
    } else {
        // Compact spelling: the named storage formats only.
        for (const auto& f : {s16_15, u0_32, s0_31, s8_7, u0_16, s0_15}) {
            std::string compact = f.name();
            compact.erase(compact.find('.'), 1);
            if (compact == text) return f;
        }
        return fail();
    }
    return FixedFormat(is_signed, i, p);
}

double Dyadic::to_double() const { return std::ldexp(static_cast<double>(mantissa), exponent); }

Dyadic Dyadic::normalized() const {
    if (mantissa == 0) return Dyadic{0, 0};
    Dyadic d = *this;
    while ((d.mantissa & 1) == 0) {
        d.mantissa /= 2;
        ++d.exponent;
    }
    return d;
}

namespace {

// Bring both operands to the smaller exponent.
std::pair<Wide, Wide> align(const Dyadic& a, const Dyadic& b) {
    const Dyadic na = a.normalized();
    const Dyadic nb = b.normalized();
    const int e = std::min(na.exponent, nb.exponent);
    const int sa = na.exponent - e;
    const int sb = nb.exponent - e;
    if (sa > 100 || sb > 100) throw std::overflow_error("dyadic exponents too far apart to compare");
    return {na.mantissa * (Wide{1} << sa), nb.mantissa * (Wide{1} << sb)};
}

}  // namespace

bool operator==(const Dyadic& a, const Dyadic& b) {
    const Dyadic na = a.normalized();
    const Dyadic nb = b.normalized();
    return na.mantissa == nb.mantissa && na.exponent == nb.exponent;
}

std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
    const auto [ma, mb] = align(a, b);
    if (ma < mb) return std::strong_ordering::less;
    if (ma > mb) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

Dyadic format_epsilon(FixedFormat format) { return Dyadic{1, -format.frac_bits}; }

Range format_range(FixedFormat format) {
    return Range{Dyadic{format.raw_min(), -format.frac_bits}, Dyadic{format.raw_max(), -format.frac_bits}};
}

}  // namespace fixsr
