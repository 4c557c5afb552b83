// Acceptance suite: one PASS/FAIL line per criterion. Tolerances are fixed
// here. Pass criterion numbers as arguments to run a subset.

#include <cctype>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fixsr/bed.hpp"
#include "fixsr/cli.hpp"
#include "fixsr/experiments.hpp"
#include "fixsr/multiply.hpp"
#include "fixsr/rounding.hpp"
#include "rational_oracle.hpp"
#include "staged_rk.hpp"

using namespace fixsr;
namespace fs = std::filesystem;

namespace {

constexpr std::size_t target_spike = 650;
constexpr std::size_t sr_repeats = 100;
constexpr std::size_t dither_repeats = 40;

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;

    void require(bool ok, const std::string& note) {
        if (!ok) {
            pass = false;
            notes.push_back("FAILED " + note);
        }
    }
    void note(const std::string& text) { notes.push_back(text); }
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

std::string stat_text(const LagStat& s) { return fmt("%.2f (sd %.2f, n %zu)", s.mean, s.sd, s.n_runs); }

const LagSeries& cell(const LagStudy& st, SolverKind solver, const std::string& neuron, const std::string& backend) {
    for (const LagSeries& s : st.cells) {
        if (s.solver == solver && s.neuron == neuron && s.backend == backend) return s;
    }
    throw std::logic_error("missing study cell");
}

StudyConfig base_study() {
    StudyConfig c;
    c.solvers.assign(all_solvers.begin(), all_solvers.end());
    c.spikes = target_spike;
    c.repeats = sr_repeats;
    c.base_seed = 1;
    return c;
}

// Fixed-point 32-bit study over RS and FS, shared by criterion 6, the
// ordering property and criterion 10.
const LagStudy& table_study_kiss() {
    static const LagStudy st = [] {
        StudyConfig c = base_study();
        c.neurons = {"RS", "FS"};
        c.backends = {BackendSpec::parse("fxp32:rd"), BackendSpec::parse("fxp32:rn"), BackendSpec::parse("fxp32:sr")};
        return run_lag_study(c);
    }();
    return st;
}

// ---------------------------------------------------------------------------

Outcome constant_rounding() {
    Outcome o;
    const double k004 = to_real(from_real(0.04, s16_15, RoundingSpec::rn()));
    const double k01 = to_real(from_real(0.1, s16_15, RoundingSpec::rn()));
    o.require(k004 == 0.040008544921875, fmt("0.04 -> %.17g", k004));
    o.require(k01 == 0.100006103515625, fmt("0.1 -> %.17g", k01));
    o.note(fmt("0.04 -> %.15f, 0.1 -> %.15f", k004, k01));
    return o;
}

Outcome bed_moments() {
    Outcome o;
    for (const MulCase& mc : supported_mul_cases) {
        for (RoundingSpec mode : {RoundingSpec::rd(), RoundingSpec::rn(), RoundingSpec::sr()}) {
            BedConfig cfg;
            cfg.mul_case = mc;
            cfg.mode = mode;
            cfg.n = 50000;
            cfg.seed = 1;
            const BedSummary s = run_bed(cfg);
            const std::string tag = mc.name() + " " + mode.name();
            switch (mode.mode) {
                case RoundingMode::rd:
                    o.require(s.min >= -1.0 && s.max <= 0.0, tag + fmt(" support [%g, %g]", s.min, s.max));
                    o.require(std::abs(s.mean + 0.5) < 0.01, tag + fmt(" mean %.4f", s.mean));
                    break;
                case RoundingMode::rn:
                    o.require(s.min >= -0.5 && s.max <= 0.5, tag + fmt(" support [%g, %g]", s.min, s.max));
                    o.require(std::abs(s.mean) < 0.01, tag + fmt(" mean %.4f", s.mean));
                    break;
                case RoundingMode::sr:
                    o.require(s.min >= -1.0 && s.max <= 1.0, tag + fmt(" support [%g, %g]", s.min, s.max));
                    o.require(std::abs(s.mean) < 0.01, tag + fmt(" mean %.4f", s.mean));
                    o.require(std::abs(s.variance - 1.0 / 6.0) < 0.01, tag + fmt(" variance %.4f", s.variance));
                    break;
            }
        }
    }
    o.note("10 cases x {rd, rn, sr}, n = 50000");
    return o;
}

Outcome sr_unbiased_and_equivalent() {
    Outcome o;
    // Up-rates for 200 residuals r / 2^16, 10^5 roundings each.
    constexpr int d = 16;
    constexpr int trials = 100000;
    RandomStream rng = RandomStream::from_seed(PrngKind::kiss99, 1);
    int outside = 0;
    double worst_z = 0.0;
    for (int i = 0; i < 200; ++i) {
        const Wide r = static_cast<Wide>(std::llround((i + 1) * 65536.0 / 201.0));
        const Wide x = (static_cast<Wide>(i - 100) << d) + r;
        const Wide floor = x >> d;
        int ups = 0;
        for (int t = 0; t < trials; ++t) ups += (round_raw(x, d, RoundingSpec::sr(), &rng) != floor) ? 1 : 0;
        const double p = static_cast<double>(r) / 65536.0;
        const double z = (ups - trials * p) / std::sqrt(trials * p * (1 - p));
        worst_z = std::max(worst_z, std::abs(z));
        outside += std::abs(z) > 3.0 ? 1 : 0;
    }
    o.require(outside == 0, fmt("%d of 200 up-rates outside 3 sigma", outside));
    o.note(fmt("largest |z| over 200 residuals: %.2f", worst_z));

    // Comparator and adder forms on random pairs.
    std::mt19937_64 gen(5);
    std::uniform_int_distribution<int> dd(1, 64);
    std::uniform_int_distribution<std::int64_t> xd(std::numeric_limits<std::int64_t>::min(),
                                                   std::numeric_limits<std::int64_t>::max());
    long mismatches = 0;
    for (int t = 0; t < 100000; ++t) {
        const int disc = dd(gen);
        const int k = effective_sr_bits(RoundingSpec::full_width, disc);
        const Wide x = static_cast<Wide>(xd(gen)) * (static_cast<Wide>(1) << 20) + static_cast<Wide>(gen() & 0xFFFFF);
        const std::uint32_t draw = static_cast<std::uint32_t>(gen()) >> (32 - k);
        mismatches += sr_round_compare(x, disc, k, draw) != sr_round_add(x, disc, k, draw) ? 1 : 0;
    }
    o.require(mismatches == 0, fmt("%ld random mismatches", mismatches));

    long exhaustive = 0;
    for (int disc = 1; disc <= 8; ++disc) {
        for (int k = 1; k <= disc; ++k) {
            for (Wide x = -(Wide{1} << (disc + 2)); x < (Wide{1} << (disc + 2)); ++x) {
                for (std::uint32_t draw = 0; draw < (1u << k); ++draw) {
                    ++exhaustive;
                    if (sr_round_compare(x, disc, k, draw) != sr_round_add(x, disc, k, draw)) ++mismatches;
                }
            }
        }
    }
    o.require(mismatches == 0, fmt("%ld exhaustive mismatches", mismatches));
    o.note(fmt("comparator == adder on 100000 random and %ld exhaustive cases", exhaustive));
    return o;
}

Outcome multiply_oracle() {
    Outcome o;
    std::mt19937_64 gen(2718);
    long mismatches = 0;
    for (const MulCase& mc : supported_mul_cases) {
        std::uniform_int_distribution<std::int64_t> ld(mc.lhs.raw_min(), mc.lhs.raw_max());
        std::uniform_int_distribution<std::int64_t> rd(mc.rhs.raw_min(), mc.rhs.raw_max());
        for (int t = 0; t < 100000; ++t) {
            const FixedValue a = FixedValue::from_raw(ld(gen), mc.lhs);
            const FixedValue b = FixedValue::from_raw(rd(gen), mc.rhs);
            const oracle::Rational exact =
                oracle::value(a.raw(), mc.lhs.frac_bits) * oracle::value(b.raw(), mc.rhs.frac_bits);
            if (oracle::Int(mul(a, b, mc, RoundingSpec::rd()).raw()) != oracle::round_down(exact, mc.out)) ++mismatches;
            if (oracle::Int(mul(a, b, mc, RoundingSpec::rn()).raw()) != oracle::round_nearest(exact, mc.out)) ++mismatches;
        }
    }
    o.require(mismatches == 0, fmt("%ld mismatches", mismatches));
    o.note("10 cases x 100000 pairs x {rd, rn}");
    return o;
}

Outcome solver_faithfulness() {
    Outcome o;
    const NeuronParams p = NeuronParams::regular_spiking();
    DoubleArith ar;
    const auto k = ar.make_constants(make_constant_values(p, 0.1, ConstantSource::exact));
    // ulps at the larger state magnitude before and after the step
    auto ulps = [](double got, double want, double before) {
        const double scale = std::max(std::abs(want), std::abs(before));
        return std::abs(got - want) / (std::nextafter(scale, INFINITY) - scale);
    };
    std::string summary;
    for (SolverKind solver : all_solvers) {
        std::mt19937_64 gen(99);
        std::uniform_real_distribution<double> vd(-80.0, 30.0), ud(-20.0, 10.0), id(0.0, 10.0);
        double worst = 0.0;
        for (int t = 0; t < 10000; ++t) {
            const double v = vd(gen), u = ud(gen), i = id(gen);
            const auto e = esr_step(solver, NeuronState<double>{v, u}, i, k, ar);
            const staged::Y s = staged::step(solver, {v, u}, i, 0.1, p);
            worst = std::max({worst, ulps(e.v, s.v, v), ulps(e.u, s.u, u)});
        }
        o.require(worst <= 4.0, fmt("%s worst %.1f ulps", std::string(to_string(solver)).c_str(), worst));
        summary += fmt("%s %.0f ", std::string(to_string(solver)).c_str(), worst);
    }
    o.note("worst ulps over 10^4 states: " + summary);
    return o;
}

Outcome table_reproduction() {
    Outcome o;
    const LagStudy& st = table_study_kiss();
    for (SolverKind solver : all_solvers) {
        const std::string name(to_string(solver));
        const LagStat rd = cell(st, solver, "RS", "fxp32:rd").at(target_spike);
        const LagStat rn = cell(st, solver, "RS", "fxp32:rn").at(target_spike);
        const LagStat sr = cell(st, solver, "RS", "fxp32:sr").at(target_spike);
        o.note(name + " RS  rd " + stat_text(rd) + "  rn " + stat_text(rn) + "  sr " + stat_text(sr));
        o.require(rd.n_runs == 1 && rd.mean < 0.0 && std::abs(rd.mean) > 50.0, name + " (a) rd lead > 50 ms");
        if (solver == SolverKind::rk2_midpoint || solver == SolverKind::rk2_trapezoid) {
            o.require(rn.n_runs == 1 && std::abs(rn.mean) < 30.0, name + " (b) |rn| < 30 ms");
            o.require(sr.n_runs == sr_repeats && std::abs(sr.mean) < 30.0, name + " (b) |sr| < 30 ms");
        }
        o.require(sr.n_runs == sr_repeats && sr.sd >= 0.5 && sr.sd <= 10.0, name + " (c) sr sd in [0.5, 10]");
    }
    return o;
}

// Not a numbered criterion: |SR| <= |RD| and |RN| <= |RD| at spike 650.
Outcome ordering_property() {
    Outcome o;
    const LagStudy& st = table_study_kiss();
    for (SolverKind solver : all_solvers) {
        for (const char* neuron : {"RS", "FS"}) {
            const double rd = cell(st, solver, neuron, "fxp32:rd").at(target_spike).mean;
            const double rn = cell(st, solver, neuron, "fxp32:rn").at(target_spike).mean;
            const double sr = cell(st, solver, neuron, "fxp32:sr").at(target_spike).mean;
            const std::string tag = std::string(to_string(solver)) + " " + neuron;
            o.note(tag + fmt("  rd %.2f  rn %.2f  sr %.2f", rd, rn, sr));
            o.require(std::abs(sr) <= std::abs(rd), tag + " |sr| <= |rd|");
            o.require(std::abs(rn) <= std::abs(rd), tag + " |rn| <= |rd|");
        }
    }
    return o;
}

Outcome sr_bit_sweep() {
    Outcome o;
    StudyConfig c = base_study();
    c.neurons = {"RS", "FS"};
    c.sr_bits = {2, 6, 12};
    const std::vector<SrBitsRow> rows = run_sr_bits_sweep(c);
    std::map<std::pair<std::string, int>, LagStat> by;
    for (const SrBitsRow& r : rows) by[{std::string(to_string(r.solver)) + " " + r.neuron, r.k_bits}] = r.lag650;
    for (SolverKind solver : all_solvers) {
        for (const char* neuron : {"RS", "FS"}) {
            const std::string tag = std::string(to_string(solver)) + " " + neuron;
            const LagStat k2 = by.at({tag, 2}), k6 = by.at({tag, 6}), k12 = by.at({tag, 12});
            o.note(tag + "  k2 " + stat_text(k2) + "  k6 " + stat_text(k6) + "  k12 " + stat_text(k12));
            o.require(k6.n_runs == sr_repeats && k12.n_runs == sr_repeats, tag + " complete runs");
            o.require(std::abs(k6.mean - k12.mean) < 2.0 * (k6.sd + k12.sd), tag + " k6 ~ k12");
            if (std::string(neuron) == "RS") {
                o.require(std::abs(k2.mean) > 3.0 * std::abs(k12.mean) + 2.0 * (k2.sd + k12.sd),
                          tag + " k2 degraded");
            }
        }
    }
    return o;
}

Outcome sixteen_bit() {
    Outcome o;
    StudyConfig c = base_study();
    c.solvers = {SolverKind::rk2_midpoint, SolverKind::rk2_trapezoid};
    c.neurons = {"RS", "FS"};
    c.constants = ConstantSource::fxp16;
    c.backends = {BackendSpec::parse("fxp16:rd"), BackendSpec::parse("fxp16:rn"), BackendSpec::parse("fxp16:sr")};
    const LagStudy st = run_lag_study(c);
    bool rn_degraded = false;
    for (SolverKind solver : c.solvers) {
        for (const char* neuron : {"RS", "FS"}) {
            const std::string tag = std::string(to_string(solver)) + " " + neuron;
            const LagSeries& rd = cell(st, solver, neuron, "fxp16:rd");
            const LagSeries& rn = cell(st, solver, neuron, "fxp16:rn");
            const LagSeries& sr = cell(st, solver, neuron, "fxp16:sr");
            const LagStat rn650 = rn.at(target_spike);
            o.note(tag + "  rd " + stat_text(rd.at(target_spike)) + "  rn " +
                   (rn650.n_runs == 0 ? fmt("censored at %zu spikes", rn.spike_counts.at(0)) : stat_text(rn650)) +
                   "  sr " + stat_text(sr.at(target_spike)) + fmt(" censored %zu", sr.censored_runs(target_spike)));
            rn_degraded = rn_degraded || rn650.n_runs == 0 || std::abs(rn650.mean) > 500.0;
            if (std::string(neuron) == "RS") {
                const LagStat r = rd.at(target_spike);
                o.require(r.n_runs == 1 && r.mean < -5000.0, tag + " rd lead > 5000 ms");
                const LagStat s = sr.at(target_spike);
                o.require(sr.censored_runs(target_spike) == 0 && s.mean > 0.0, tag + " sr reaches 650 with lag");
            }
        }
    }
    o.require(rn_degraded, "no 16-bit rn cell censored or beyond 500 ms");
    return o;
}

Outcome dither_effect() {
    Outcome o;
    StudyConfig c = base_study();
    c.solvers = {SolverKind::rk2_midpoint};
    c.neurons = {"RS", "FS"};
    c.repeats = dither_repeats;
    c.constants = ConstantSource::float32;
    c.backends = {BackendSpec::parse("single")};
    c.multipliers = {0, 1, 16, 8192};
    const std::vector<DitherRow> rows = run_dither_sweep(c);
    std::map<std::pair<std::string, double>, LagStat> by;
    for (const DitherRow& r : rows) by[{r.neuron, r.multiplier}] = r.lag650;
    for (const char* neuron : {"RS", "FS"}) {
        const LagStat m0 = by.at({neuron, 0}), m1 = by.at({neuron, 1});
        const LagStat m16 = by.at({neuron, 16}), m8k = by.at({neuron, 8192});
        o.note(std::string(neuron) + "  m0 " + stat_text(m0) + "  m1 " + stat_text(m1) + "  m16 " + stat_text(m16) +
               "  m8192 " + stat_text(m8k));
        o.require(m1.n_runs == dither_repeats && std::abs(m1.mean) < std::abs(m0.mean),
                  std::string(neuron) + " |m1| < |m0|");
        if (std::string(neuron) == "RS") o.require(m8k.sd > 3.0 * m16.sd, "RS sd(8192) > 3 sd(16)");
    }
    return o;
}

std::map<std::string, std::string> read_dir(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        std::ifstream in(e.path(), std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        files[e.path().filename().string()] = s.str();
    }
    return files;
}

Outcome determinism() {
    Outcome o;
    const fs::path root = fs::temp_directory_path() / "fixsr_acceptance";
    std::vector<std::map<std::string, std::string>> outputs;
    for (const char* run : {"a", "b"}) {
        const fs::path dir = root / run;
        fs::remove_all(dir);
        const std::vector<std::string> args = {"fixsr",     "lag",      "--solver",  "rk2mid,rk2trap",
                                               "--neuron",  "RS,FS",    "--backend", "fxp32:rd,fxp32:sr,fxp16:sr",
                                               "--repeats", "10",       "--seed",    "1",
                                               "--out",     dir.string()};
        std::vector<const char*> argv;
        for (const std::string& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
        o.require(code == 0, fmt("lag invocation exited %d: ", code) + err.str());
        outputs.push_back(read_dir(dir));
    }
    o.require(!outputs[0].empty() && outputs[0] == outputs[1], "lag CSVs differ between identical invocations");
    o.note(fmt("%zu CSV files byte-identical", outputs[0].size()));

    // Generator insensitivity of the SR cells.
    const LagStudy& kiss = table_study_kiss();
    for (PrngKind kind : {PrngKind::lfsr33, PrngKind::ranqd1}) {
        StudyConfig c = base_study();
        c.neurons = {"RS", "FS"};
        c.prng = kind;
        c.backends = {BackendSpec::parse("fxp32:sr")};
        const LagStudy other = run_lag_study(c);
        for (SolverKind solver : all_solvers) {
            for (const char* neuron : {"RS", "FS"}) {
                const LagStat a = cell(kiss, solver, neuron, "fxp32:sr").at(target_spike);
                const LagStat b = cell(other, solver, neuron, "fxp32:sr").at(target_spike);
                const double combined = std::sqrt(a.sd * a.sd + b.sd * b.sd);
                const std::string tag =
                    std::string(to_string(solver)) + " " + neuron + " kiss99 vs " + std::string(to_string(kind));
                o.note(tag + fmt("  %.2f vs %.2f (combined sd %.2f)", a.mean, b.mean, combined));
                o.require(std::abs(a.mean - b.mean) < combined, tag);
            }
        }
    }
    return o;
}

struct Criterion {
    std::string id;
    const char* title;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all = {
        {"1", "exact constant rounding", constant_rounding},
        {"2", "bit error distribution moments", bed_moments},
        {"3", "SR unbiasedness and form equivalence", sr_unbiased_and_equivalent},
        {"4", "multiplies equal the rational oracle", multiply_oracle},
        {"5", "unrolled solvers match staged RK", solver_faithfulness},
        {"6", "32-bit spike lag table", table_reproduction},
        {"ordering", "32-bit |sr|, |rn| <= |rd| at spike 650", ordering_property},
        {"7", "SR bit-width sweep", sr_bit_sweep},
        {"8", "16-bit degradation", sixteen_bit},
        {"9", "input dither", dither_effect},
        {"10", "determinism and generator insensitivity", determinism},
    };
    std::set<std::string> wanted(argv + 1, argv + argc);
    int failures = 0;
    for (const Criterion& c : all) {
        if (!wanted.empty() && !wanted.count(c.id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.notes.push_back(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const char* kind = std::isdigit(static_cast<unsigned char>(c.id[0])) ? "criterion" : "property";
        std::printf("%s %s: %s  %s (%.1f s)\n", kind, c.id.c_str(), o.pass ? "PASS" : "FAIL", c.title, secs);
        for (const std::string& n : o.notes) std::printf("    %s\n", n.c_str());
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
