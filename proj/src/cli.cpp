#include "fixsr/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fixsr/bed.hpp"
#include "fixsr/experiments.hpp"

namespace fixsr {

namespace {

namespace fs = std::filesystem;

// Consumed by expand_config before parsing; registered for --help only.
void add_config_flag(CLI::App* app) {
    app->add_option("--config", "flat key=value file; command-line flags take precedence");
}

bool has_flag(const std::vector<std::string>& args, const std::string& flag) {
    for (const std::string& a : args) {
        if (a == flag || a.starts_with(flag + "=")) return true;
    }
    return false;
}

/// Replaces `--config FILE` with the file's key=value lines as flags, skipping
/// keys already given on the command line.
std::vector<std::string> expand_config(std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw CLI::ArgumentMismatch("--config needs a file name");
            path = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + 2));
            break;
        }
        if (args[i].starts_with("--config=")) {
            path = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
            break;
        }
    }
    if (path.empty()) return args;

    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config file " + path);
    std::vector<std::string> extra;
    std::string line;
    int line_no = 0;
    auto trim = [](std::string t) {
        const auto b = t.find_first_not_of(" \t\r");
        const auto e = t.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : t.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos || trim(line.substr(0, eq)).empty()) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected key=value");
        }
        const std::string flag = "--" + trim(line.substr(0, eq));
        if (has_flag(args, flag)) continue;
        extra.push_back(flag);
        extra.push_back(trim(line.substr(eq + 1)));
    }
    args.insert(args.end(), extra.begin(), extra.end());
    return args;
}

struct CommonOptions {
    std::vector<std::string> solvers;
    std::vector<std::string> neurons;
    std::string seed = "1";
    std::string prng = "kiss99";
    std::size_t repeats = 100;
    std::size_t spikes = 650;
    double h_ms = 0.1;
    double amplitude = 4.775;
    std::string constants = "exact";
    unsigned threads = 0;
    std::string out_dir;
};

void add_common(CLI::App* app, CommonOptions& o, bool solver_required) {
    auto* s = app->add_option("--solver", o.solvers, "rk2mid, rk2trap, rk3heun, chantsai or all")->delimiter(',');
    auto* n = app->add_option("--neuron", o.neurons, "RS, CH, FS or all")->delimiter(',');
    if (solver_required) {
        s->required();
        n->required();
    }
    app->add_option("--seed", o.seed, "base seed, decimal or 0x-hex")->capture_default_str();
    app->add_option("--prng", o.prng, "kiss99, lfsr33 or ranqd1")->capture_default_str();
    app->add_option("--repeats", o.repeats, "runs per stochastic cell")->capture_default_str()->check(
        CLI::PositiveNumber);
    app->add_option("--spikes", o.spikes, "spike index compared")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--dt", o.h_ms, "timestep (ms)")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--amplitude", o.amplitude, "DC input (nA)")->capture_default_str();
    app->add_option("--constants", o.constants, "constant precision: exact, float or fxp16")->capture_default_str();
    app->add_option("--threads", o.threads, "worker threads (0 = all cores)")->capture_default_str();
    app->add_option("--out", o.out_dir, "output directory (default $FIXSR_OUTPUT_DIR or ./results)");
    add_config_flag(app);
}

std::vector<SolverKind> solvers_from(const std::vector<std::string>& names) {
    std::vector<SolverKind> out;
    for (const std::string& n : names) {
        if (n == "all") return {all_solvers.begin(), all_solvers.end()};
        out.push_back(parse_solver(n));
    }
    if (out.empty()) out.push_back(SolverKind::rk2_midpoint);
    return out;
}

std::vector<std::string> neurons_from(const std::vector<std::string>& names) {
    std::vector<std::string> out;
    for (const std::string& n : names) {
        if (n == "all") return {"RS", "CH", "FS"};
        NeuronParams::preset(n);
        std::string upper = n;
        for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        out.push_back(upper);
    }
    if (out.empty()) out.push_back("RS");
    return out;
}

StudyConfig study_from(const CommonOptions& o) {
    StudyConfig c;
    c.solvers = solvers_from(o.solvers);
    c.neurons = neurons_from(o.neurons);
    c.base_seed = parse_seed(o.seed);
    c.prng = parse_prng_kind(o.prng);
    c.repeats = o.repeats;
    c.spikes = o.spikes;
    c.h_ms = o.h_ms;
    c.input = InputSource::dc(o.amplitude);
    c.constants = parse_constant_source(o.constants);
    c.threads = o.threads;
    return c;
}

fs::path output_dir(const std::string& flag) {
    fs::path dir = flag.empty() ? default_output_dir() : fs::path(flag);
    fs::create_directories(dir);
    return dir;
}

template <class Writer>
void write_file(const fs::path& path, Writer&& writer) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    writer(os);
    os.flush();
    if (!os) throw std::runtime_error("write to " + path.string() + " failed");
}

std::string fixed2(double x) {
    if (std::isnan(x)) return "NA";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

// File-name-safe form of a backend name.
std::string slug(std::string s) {
    for (char& c : s) {
        if (c == ':' || c == '+') c = '_';
    }
    return s;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Fixed-point rounding experiments on the Izhikevich neuron", "fixsr"};
    app.require_subcommand(1);

    // bed
    auto* bed = app.add_subcommand("bed", "bit error distribution of a multiply");
    std::string bed_case, bed_mode, bed_seed = "1", bed_prng = "kiss99", bed_out;
    std::size_t bed_n = 50000, bed_bins = 0;
    bed->add_option("--case", bed_case, "multiply case, e.g. s1615xs1615, or all")->required();
    bed->add_option("--mode", bed_mode, "rd, rn, sr, srK or all")->required();
    bed->add_option("--n", bed_n, "operand pairs")->capture_default_str()->check(CLI::PositiveNumber);
    bed->add_option("--bins", bed_bins, "histogram bins (default 15 for RD/RN, 40 for SR)");
    bed->add_option("--seed", bed_seed, "seed, decimal or 0x-hex")->capture_default_str();
    bed->add_option("--prng", bed_prng, "kiss99, lfsr33 or ranqd1")->capture_default_str();
    bed->add_option("--out", bed_out, "output directory");
    add_config_flag(bed);

    // lag
    auto* lag = app.add_subcommand("lag", "spike lag against the double reference");
    CommonOptions lag_o;
    std::vector<std::string> lag_backends;
    add_common(lag, lag_o, true);
    lag->add_option("--backend", lag_backends, "double, single, fxp32:<rd|rn|sr|srK>, fxp16:<...>[+sc]")
        ->delimiter(',')
        ->required();

    // srbits
    auto* srbits = app.add_subcommand("srbits", "spike lag versus SR comparison bits");
    CommonOptions sr_o;
    std::vector<int> sr_bits{2, 4, 6, 8, 12};
    add_common(srbits, sr_o, true);
    srbits->add_option("--bits", sr_bits, "SR bit widths")->delimiter(',')->capture_default_str();

    // dither
    auto* dither = app.add_subcommand("dither", "spike lag versus input dither");
    CommonOptions di_o;
    di_o.repeats = 40;
    di_o.constants = "float";
    std::vector<std::string> di_backends;
    std::vector<double> di_mult{0, 1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024, 2048, 4096, 8192};
    add_common(dither, di_o, true);
    dither->add_option("--backend", di_backends, "backends (default double,single,fxp32:rn,fxp32:sr)")
        ->delimiter(',');
    dither->add_option("--multipliers", di_mult, "dither SD in s16.15 LSBs")->delimiter(',');

    // trace
    auto* trace = app.add_subcommand("trace", "state trace of one run");
    CommonOptions tr_o;
    std::string tr_backend;
    double tr_duration = 1000.0;
    add_common(trace, tr_o, true);
    trace->add_option("--backend", tr_backend, "backend")->required();
    trace->add_option("--duration", tr_duration, "simulated time (ms)")->capture_default_str();

    std::vector<std::string> args(argv + (argc > 0 ? 1 : 0), argv + argc);
    try {
        args = expand_config(std::move(args));
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n";
        const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
        err << sub->help();
        return 2;
    }

    try {
        if (bed->parsed()) {
            const fs::path dir = output_dir(bed_out);
            std::vector<MulCase> cases;
            if (bed_case == "all") {
                cases.assign(supported_mul_cases.begin(), supported_mul_cases.end());
            } else {
                cases.push_back(MulCase::parse(bed_case));
            }
            std::vector<RoundingSpec> modes;
            if (bed_mode == "all") {
                modes = {RoundingSpec::rd(), RoundingSpec::rn(), RoundingSpec::sr()};
            } else {
                modes.push_back(RoundingSpec::parse(bed_mode));
            }
            std::vector<BedSummary> rows;
            out << "case            mode    n        mean        sd       min       max\n";
            for (const MulCase& mc : cases) {
                for (RoundingSpec m : modes) {
                    BedConfig c;
                    c.mul_case = mc;
                    c.mode = m;
                    c.n = bed_n;
                    c.seed = parse_seed(bed_seed);
                    c.prng = parse_prng_kind(bed_prng);
                    BedSummary s = run_bed(c);
                    const std::string stem = mc.name() + "_" + m.name();
                    write_file(dir / ("bed_" + stem + ".csv"), [&](std::ostream& os) { write_bed_samples_csv(os, s); });
                    const Histogram h = histogram(s.samples, bed_bins ? bed_bins : default_bins(m));
                    write_file(dir / ("hist_" + stem + ".csv"), [&](std::ostream& os) { write_histogram_csv(os, h); });
                    char line[160];
                    std::snprintf(line, sizeof line, "%-15s %-5s %7zu %+.6f %.6f %+.5f %+.5f\n", mc.name().c_str(),
                                  m.name().c_str(), s.n, s.mean, s.sd, s.min, s.max);
                    out << line;
                    s.samples.clear();
                    rows.push_back(std::move(s));
                }
            }
            write_file(dir / "bed_summary.csv", [&](std::ostream& os) { write_bed_summary_csv(os, rows); });
            return 0;
        }

        if (lag->parsed()) {
            StudyConfig c = study_from(lag_o);
            for (const std::string& b : lag_backends) c.backends.push_back(BackendSpec::parse(b));
            const fs::path dir = output_dir(lag_o.out_dir);
            const LagStudy study = run_lag_study(c);
            write_file(dir / "lag.csv", [&](std::ostream& os) { write_lag_csv(os, study); });
            for (const ReferenceTrain& r : study.references) {
                const std::string name = "spikes_" + std::string(to_string(r.solver)) + "_" + r.neuron + "_reference.csv";
                write_file(dir / name, [&](std::ostream& os) { write_spike_csv(os, r.spikes); });
            }
            out << "solver   neuron backend       runs censored  mean_lag" << c.spikes << "_ms  sd_ms\n";
            for (const LagSeries& s : study.cells) {
                const std::string name = "spikes_" + std::string(to_string(s.solver)) + "_" + s.neuron + "_" +
                                         slug(s.backend) + ".csv";
                write_file(dir / name, [&](std::ostream& os) { write_spike_csv(os, s.first_run); });
                const LagStat& st = s.at(c.spikes);
                char line[200];
                std::snprintf(line, sizeof line, "%-8s %-6s %-13s %4zu %8zu %14s %6s\n",
                              std::string(to_string(s.solver)).c_str(), s.neuron.c_str(), s.backend.c_str(), s.runs,
                              s.censored_runs(c.spikes), fixed2(st.mean).c_str(), fixed2(st.sd).c_str());
                out << line;
            }
            return 0;
        }

        if (srbits->parsed()) {
            StudyConfig c = study_from(sr_o);
            c.sr_bits = sr_bits;
            const fs::path dir = output_dir(sr_o.out_dir);
            const auto rows = run_sr_bits_sweep(c);
            write_file(dir / "srbits.csv", [&](std::ostream& os) { write_sr_bits_csv(os, rows); });
            out << "solver   neuron k_bits  mean_lag_ms  sd_ms\n";
            for (const SrBitsRow& r : rows) {
                char line[160];
                std::snprintf(line, sizeof line, "%-8s %-6s %6d %12s %6s\n", std::string(to_string(r.solver)).c_str(),
                              r.neuron.c_str(), r.k_bits, fixed2(r.lag650.mean).c_str(), fixed2(r.lag650.sd).c_str());
                out << line;
            }
            return 0;
        }

        if (dither->parsed()) {
            StudyConfig c = study_from(di_o);
            c.multipliers = di_mult;
            for (const std::string& b : di_backends) c.backends.push_back(BackendSpec::parse(b));
            const fs::path dir = output_dir(di_o.out_dir);
            const auto rows = run_dither_sweep(c);
            write_file(dir / "dither.csv", [&](std::ostream& os) { write_dither_csv(os, rows); });
            out << "solver   neuron backend     multiplier  mean_lag_ms  sd_ms\n";
            for (const DitherRow& r : rows) {
                char line[160];
                std::snprintf(line, sizeof line, "%-8s %-6s %-11s %10g %12s %6s\n",
                              std::string(to_string(r.solver)).c_str(), r.neuron.c_str(), r.backend.c_str(),
                              r.multiplier, fixed2(r.lag650.mean).c_str(), fixed2(r.lag650.sd).c_str());
                out << line;
            }
            return 0;
        }

        if (trace->parsed()) {
            const StudyConfig c = study_from(tr_o);
            BackendSpec b = BackendSpec::parse(tr_backend);
            b.constants = c.constants;
            const fs::path dir = output_dir(tr_o.out_dir);
            for (SolverKind s : c.solvers) {
                for (const std::string& n : c.neurons) {
                    SimulationConfig sc;
                    sc.duration_ms = tr_duration;
                    sc.h_ms = c.h_ms;
                    sc.params = NeuronParams::preset(n);
                    sc.input = c.input;
                    sc.solver = s;
                    sc.record_trace = true;
                    sc.prng = c.prng;
                    const SimulationResult r = simulate(sc, b, c.base_seed);
                    const std::string stem = std::string(to_string(s)) + "_" + n + "_" + slug(b.name());
                    write_file(dir / ("trace_" + stem + ".csv"), [&](std::ostream& os) { write_trace_csv(os, r.trace); });
                    write_file(dir / ("spikes_" + stem + ".csv"),
                               [&](std::ostream& os) { write_spike_csv(os, r.spike_times_ms); });
                    out << stem << ": " << r.steps << " steps, " << r.spike_times_ms.size() << " spikes, "
                        << r.saturations << " saturations\n";
                }
            }
            return 0;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace fixsr
