#include "fixsr/bed.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "fixsr/csv.hpp"

namespace fixsr {

std::pair<OperandRange, OperandRange> default_operand_ranges(const MulCase& mc) {
    auto full = [](FixedFormat f) {
        return OperandRange{std::ldexp(static_cast<double>(f.raw_min()), -f.frac_bits),
                            std::ldexp(static_cast<double>(f.raw_max()), -f.frac_bits)};
    };
    if (mc.lhs == s16_15 && mc.rhs == s16_15) return {{-256.0, 256.0}, {-256.0, 256.0}};
    if (mc.lhs == s8_7 && mc.rhs == s8_7) return {{-16.0, 16.0}, {-16.0, 16.0}};
    return {full(mc.lhs), full(mc.rhs)};
}

namespace {

struct RawRange {
    std::int64_t lo;
    std::int64_t hi;
};

RawRange raw_range(OperandRange r, FixedFormat f) {
    if (!(r.lo <= r.hi)) throw std::invalid_argument("operand range must satisfy lo <= hi");
    const double lo = std::ceil(std::ldexp(r.lo, f.frac_bits));
    const double hi = std::floor(std::ldexp(r.hi, f.frac_bits));
    RawRange out{std::max<std::int64_t>(static_cast<std::int64_t>(std::max(lo, -0x1p62)), f.raw_min()),
                 std::min<std::int64_t>(static_cast<std::int64_t>(std::min(hi, 0x1p62)), f.raw_max())};
    if (out.lo > out.hi) throw std::invalid_argument("operand range contains no grid point of " + f.name());
    return out;
}

// Unbiased uniform integer in [lo, hi] by rejection on 64-bit draws.
std::int64_t uniform_raw(RandomStream& rng, RawRange r) {
    const std::uint64_t span = static_cast<std::uint64_t>(r.hi - r.lo) + 1;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
    for (;;) {
        const std::uint64_t x = (static_cast<std::uint64_t>(rng.next_u32()) << 32) | rng.next_u32();
        if (x < limit) return r.lo + static_cast<std::int64_t>(x % span);
    }
}

}  // namespace

BedSummary run_bed(const BedConfig& cfg) {
    if (cfg.n == 0) throw std::invalid_argument("BED run needs n >= 1");
    const MulCase& mc = cfg.mul_case;
    if (std::find(supported_mul_cases.begin(), supported_mul_cases.end(), mc) == supported_mul_cases.end()) {
        throw std::invalid_argument("unsupported multiply case " + mc.name());
    }
    const auto defaults = default_operand_ranges(mc);
    const RawRange lr = raw_range(cfg.lhs_range.value_or(defaults.first), mc.lhs);
    const RawRange rr = raw_range(cfg.rhs_range.value_or(defaults.second), mc.rhs);

    RandomStream operands = RandomStream::from_seed(cfg.prng, cfg.seed);
    RandomStream rounding = RandomStream::from_seed(cfg.prng, cfg.seed ^ 0x9e3779b97f4a7c15ull);
    const int d = mc.discard_bits();

    BedSummary s;
    s.mul_case = mc;
    s.mode = cfg.mode;
    s.n = cfg.n;
    s.samples.reserve(cfg.n);
    for (std::size_t i = 0; i < cfg.n; ++i) {
        const FixedValue a = FixedValue::from_raw(uniform_raw(operands, lr), mc.lhs);
        const FixedValue b = FixedValue::from_raw(uniform_raw(operands, rr), mc.rhs);
        bool sat = false;
        const FixedValue r = mul(a, b, mc, cfg.mode, &rounding, &sat);
        s.saturations += sat ? 1 : 0;
        // |numerator| < 2^(d+1) unless saturated, so the quotient is exact.
        const Wide diff = static_cast<Wide>(r.raw()) * (static_cast<Wide>(1) << d) - exact_product(a.raw(), b.raw());
        s.samples.push_back(std::ldexp(static_cast<double>(diff), -d));
    }

    double sum = 0.0;
    for (double e : s.samples) sum += e;
    s.mean = sum / static_cast<double>(s.n);
    double ss = 0.0;
    for (double e : s.samples) ss += (e - s.mean) * (e - s.mean);
    s.variance = s.n > 1 ? ss / static_cast<double>(s.n - 1) : 0.0;
    s.sd = std::sqrt(s.variance);
    const auto [mn, mx] = std::minmax_element(s.samples.begin(), s.samples.end());
    s.min = *mn;
    s.max = *mx;
    return s;
}

Histogram histogram(const std::vector<double>& samples, std::size_t bins) {
    if (samples.empty()) throw std::invalid_argument("histogram of an empty sample set");
    const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
    if (*mn == *mx) return histogram(samples, bins, *mn - 0.5, *mx + 0.5);
    return histogram(samples, bins, *mn, *mx);
}

Histogram histogram(const std::vector<double>& samples, std::size_t bins, double lo, double hi) {
    if (samples.empty()) throw std::invalid_argument("histogram of an empty sample set");
    if (bins == 0) throw std::invalid_argument("histogram needs at least one bin");
    if (!(lo < hi)) throw std::invalid_argument("histogram range must satisfy lo < hi");
    Histogram h;
    const double width = (hi - lo) / static_cast<double>(bins);
    h.edges.resize(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i) h.edges[i] = lo + width * static_cast<double>(i);
    h.edges[bins] = hi;
    h.counts.assign(bins, 0);
    std::size_t inside = 0;
    for (double x : samples) {
        if (x < lo || x > hi) continue;
        auto i = static_cast<std::size_t>((x - lo) / width);
        h.counts[std::min(i, bins - 1)] += 1;
        ++inside;
    }
    h.density.resize(bins);
    for (std::size_t i = 0; i < bins; ++i) {
        h.density[i] = inside == 0 ? 0.0 : static_cast<double>(h.counts[i]) / (static_cast<double>(inside) * width);
    }
    return h;
}

std::size_t default_bins(RoundingSpec mode) { return mode.mode == RoundingMode::sr ? 40 : 15; }

void write_bed_samples_csv(std::ostream& os, const BedSummary& s) {
    os << "sample_index,error_lsb\n";
    for (std::size_t i = 0; i < s.samples.size(); ++i) os << i << ',' << csv_num(s.samples[i]) << '\n';
}

void write_bed_summary_csv(std::ostream& os, const std::vector<BedSummary>& rows) {
    os << "case,mode,n,mean,sd,min,max\n";
    for (const BedSummary& s : rows) {
        os << s.mul_case.name() << ',' << s.mode.name() << ',' << s.n << ',' << csv_num(s.mean) << ','
           << csv_num(s.sd) << ',' << csv_num(s.min) << ',' << csv_num(s.max) << '\n';
    }
}

void write_histogram_csv(std::ostream& os, const Histogram& h) {
    os << "bin_lo,bin_hi,count,density\n";
    for (std::size_t i = 0; i < h.density.size(); ++i) {
        os << csv_num(h.edges[i]) << ',' << csv_num(h.edges[i + 1]) << ',' << h.counts[i] << ','
           << csv_num(h.density[i]) << '\n';
    }
}

}  // namespace fixsr
