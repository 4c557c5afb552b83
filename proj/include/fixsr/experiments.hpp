#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "fixsr/backend.hpp"
#include "fixsr/bed.hpp"
#include "fixsr/izhikevich.hpp"
#include "fixsr/solvers.hpp"

namespace fixsr {

using SpikeTrain = std::vector<double>;

/// test[k] - ref[k] for k < min(upto, |test|, |ref|). Positive = lag.
std::vector<double> spike_lag(const SpikeTrain& test, const SpikeTrain& ref, std::size_t upto);

struct LagStat {
    double mean = 0.0;  // NaN when no run reached this spike
    double sd = 0.0;
    std::size_t n_runs = 0;
};

/// Mean and sample SD; SD is 0 for fewer than two values, NaN for none.
LagStat summarize(const std::vector<double>& values);

struct LagSeries {
    SolverKind solver = SolverKind::rk2_midpoint;
    std::string neuron;
    std::string backend;
    std::size_t runs = 0;                    // runs executed for this cell
    std::vector<LagStat> per_spike;          // index k - 1 for spike k
    std::vector<std::size_t> spike_counts;   // per run, capped at the target
    SpikeTrain first_run;                    // spike times of run 0

    // Runs that reached fewer spikes than the target.
    std::size_t censored_runs(std::size_t target) const;
    const LagStat& at(std::size_t spike_index) const { return per_spike.at(spike_index - 1); }
};

struct ReferenceTrain {
    SolverKind solver;
    std::string neuron;
    SpikeTrain spikes;
};

struct StudyConfig {
    std::vector<SolverKind> solvers{SolverKind::rk2_midpoint};
    std::vector<std::string> neurons{"RS"};
    std::vector<BackendSpec> backends;
    InputSource input = InputSource::dc(4.775);
    double h_ms = 0.1;
    std::size_t spikes = 650;
    // Test runs last this multiple of the reference time to the last spike.
    double duration_margin = 1.1;
    // Upper bound on the reference run.
    double max_reference_ms = 400000.0;
    std::size_t repeats = 100;
    std::uint64_t base_seed = 1;
    PrngKind prng = PrngKind::kiss99;
    // Applied to the reference and to every backend.
    ConstantSource constants = ConstantSource::exact;
    std::vector<int> sr_bits{2, 4, 6, 8, 12};
    std::vector<double> multipliers{0, 1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024, 2048, 4096, 8192};
    unsigned threads = 0;  // 0 = hardware concurrency
};

void validate(const StudyConfig& config);

/// Run r of a stochastic cell uses seed base_seed + r. Cells whose result
/// cannot vary (deterministic backend, no dither) run once.
bool cell_is_stochastic(const BackendSpec& backend, const InputSource& input);

struct LagStudy {
    std::vector<ReferenceTrain> references;
    std::vector<LagSeries> cells;  // solver-major, then neuron, then backend
};

LagStudy run_lag_study(const StudyConfig& config);

struct SrBitsRow {
    SolverKind solver;
    std::string neuron;
    int k_bits;
    LagStat lag650;
};

std::vector<SrBitsRow> run_sr_bits_sweep(const StudyConfig& config);

struct DitherRow {
    SolverKind solver;
    std::string neuron;
    std::string backend;
    double multiplier;
    LagStat lag650;
};

/// Backends default to {double, single, fxp32:rn, fxp32:sr} when the config
/// leaves them empty; the reference is the undithered double run.
std::vector<DitherRow> run_dither_sweep(const StudyConfig& config);

/// All supported multiply cases under RD, RN and SR.
std::vector<BedSummary> run_bed_suite(std::size_t n, std::uint64_t seed, PrngKind prng, unsigned threads = 0);

// CSV writers. Missing statistics are written as NA.
void write_lag_csv(std::ostream& os, const LagStudy& study);
void write_spike_csv(std::ostream& os, const SpikeTrain& spikes);
void write_sr_bits_csv(std::ostream& os, const std::vector<SrBitsRow>& rows);
void write_dither_csv(std::ostream& os, const std::vector<DitherRow>& rows);
void write_trace_csv(std::ostream& os, const std::vector<TracePoint>& trace);

/// $FIXSR_OUTPUT_DIR if set, else "results".
std::filesystem::path default_output_dir();

/// Runs tasks on a bounded pool; each task writes only its own result slot.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& task);

}  // namespace fixsr
