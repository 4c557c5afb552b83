#include "fixsr/random.hpp"

#include <charconv>
#include <cmath>
#include <numbers>

namespace fixsr {

std::string_view to_string(PrngKind kind) {
    switch (kind) {
        case PrngKind::kiss99: return "kiss99";
        case PrngKind::lfsr33: return "lfsr33";
        case PrngKind::ranqd1: return "ranqd1";
    }
    return "?";
}

PrngKind parse_prng_kind(std::string_view text) {
    if (text == "kiss99" || text == "KISS99") return PrngKind::kiss99;
    if (text == "lfsr33" || text == "LFSR33") return PrngKind::lfsr33;
    if (text == "ranqd1" || text == "RANQD1") return PrngKind::ranqd1;
    throw std::invalid_argument("unknown PRNG kind '" + std::string(text) + "'");
}

RandomStream RandomStream::seeded(PrngKind kind, std::span<const std::uint32_t> words) {
    RandomStream s(kind);
    switch (kind) {
        case PrngKind::kiss99:
            if (words.size() != 4) throw std::invalid_argument("KISS99 needs four seed words");
            if (words[0] == 0 || words[1] == 0 || words[2] == 0) {
                throw std::invalid_argument("KISS99 seed words z, w and jsr must be nonzero");
            }
            s.z_ = words[0];
            s.w_ = words[1];
            s.jsr_ = words[2];
            s.jcong_ = words[3];
            break;
        case PrngKind::lfsr33: {
            if (words.empty() || words.size() > 2) throw std::invalid_argument("LFSR33 needs one or two seed words");
            // Second word supplies bit 33.
            std::uint64_t state = words[0];
            if (words.size() == 2) state |= std::uint64_t{words[1] & 1u} << 32;
            if (state == 0) throw std::invalid_argument("LFSR33 seed must be nonzero");
            s.lfsr_ = Lfsr33(state);
            break;
        }
        case PrngKind::ranqd1:
            if (words.size() != 1) throw std::invalid_argument("RANQD1 needs one seed word");
            s.z_ = words[0];
            break;
    }
    return s;
}

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace

RandomStream RandomStream::from_seed(PrngKind kind, std::uint64_t seed) {
    std::uint64_t sm = seed;
    const std::uint64_t a = splitmix64(sm);
    const std::uint64_t b = splitmix64(sm);
    std::uint32_t words[4] = {static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                              static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    switch (kind) {
        case PrngKind::kiss99:
            for (int i = 0; i < 3; ++i) {
                if (words[i] == 0) words[i] = kiss99_default_seed[i];
            }
            return seeded(kind, words);
        case PrngKind::lfsr33:
            if (words[0] == 0 && (words[1] & 1u) == 0) words[0] = 1;
            return seeded(kind, std::span<const std::uint32_t>(words, 2));
        case PrngKind::ranqd1:
            return seeded(kind, std::span<const std::uint32_t>(words, 1));
    }
    throw std::invalid_argument("unknown PRNG kind");
}

double RandomStream::next_gaussian() {
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t parse_seed(std::string_view text) {
    int base = 10;
    if (text.starts_with("0x") || text.starts_with("0X")) {
        text.remove_prefix(2);
        base = 16;
    }
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value, base);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw std::invalid_argument("malformed seed '" + std::string(text) + "'");
    }
    return value;
}

}  // namespace fixsr
