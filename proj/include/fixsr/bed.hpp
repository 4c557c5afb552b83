#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fixsr/multiply.hpp"
#include "fixsr/random.hpp"
#include "fixsr/rounding.hpp"

namespace fixsr {

// Closed real interval an operand is drawn from.
struct OperandRange {
    double lo = 0.0;
    double hi = 0.0;
};

/// Default operand ranges: [-256, 256] for s16.15 x s16.15, [-16, 16] for
/// s8.7 x s8.7, otherwise the full range of each operand format.
std::pair<OperandRange, OperandRange> default_operand_ranges(const MulCase& mc);

struct BedConfig {
    MulCase mul_case = supported_mul_cases[0];
    RoundingSpec mode = RoundingSpec::rn();
    std::size_t n = 50000;
    std::optional<OperandRange> lhs_range;
    std::optional<OperandRange> rhs_range;
    std::uint64_t seed = 1;
    PrngKind prng = PrngKind::kiss99;
};

struct BedSummary {
    MulCase mul_case;
    RoundingSpec mode;
    std::size_t n = 0;
    double mean = 0.0;
    double sd = 0.0;
    double variance = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::size_t saturations = 0;
    // (fixed - exact) in output LSBs, in draw order.
    std::vector<double> samples;
};

/**
 * Operands are raw integers drawn uniformly over the grid points inside each
 * range from a stream seeded with `seed`; SR rounding draws come from a
 * second stream seeded with `seed` ^ 0x9e3779b97f4a7c15, so every mode sees
 * the same operand pairs.
 */
BedSummary run_bed(const BedConfig& config);

struct Histogram {
    std::vector<double> edges;    // bins + 1 entries
    std::vector<double> density;  // integrates to 1
    std::vector<std::size_t> counts;
};

/// Density histogram over [min, max] of the samples (a unit-wide bin
/// centred on the value when all samples are equal).
Histogram histogram(const std::vector<double>& samples, std::size_t bins);
Histogram histogram(const std::vector<double>& samples, std::size_t bins, double lo, double hi);

// Bins used for the standard plots: 15 for RD/RN, 40 for SR.
std::size_t default_bins(RoundingSpec mode);

void write_bed_samples_csv(std::ostream& os, const BedSummary& s);
void write_bed_summary_csv(std::ostream& os, const std::vector<BedSummary>& rows);
void write_histogram_csv(std::ostream& os, const Histogram& h);

}  // namespace fixsr
