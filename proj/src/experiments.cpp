#include "fixsr/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "fixsr/csv.hpp"

namespace fixsr {

std::vector<double> spike_lag(const SpikeTrain& test, const SpikeTrain& ref, std::size_t upto) {
    if (test.empty() || ref.empty()) throw std::invalid_argument("spike_lag needs two non-empty trains");
    const std::size_t n = std::min({upto, test.size(), ref.size()});
    std::vector<double> lag(n);
    for (std::size_t i = 0; i < n; ++i) lag[i] = test[i] - ref[i];
    return lag;
}

LagStat summarize(const std::vector<double>& values) {
    LagStat s;
    s.n_runs = values.size();
    if (values.empty()) {
        s.mean = std::numeric_limits<double>::quiet_NaN();
        s.sd = std::numeric_limits<double>::quiet_NaN();
        return s;
    }
    double sum = 0.0;
    for (double x : values) sum += x;
    s.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double x : values) ss += (x - s.mean) * (x - s.mean);
        s.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return s;
}

std::size_t LagSeries::censored_runs(std::size_t target) const {
    std::size_t n = 0;
    for (std::size_t c : spike_counts) n += c < target ? 1 : 0;
    return n;
}

void validate(const StudyConfig& c) {
    if (c.repeats < 1) throw std::invalid_argument("repeats must be >= 1");
    if (c.spikes < 1) throw std::invalid_argument("spike target must be >= 1");
    if (c.solvers.empty()) throw std::invalid_argument("no solvers selected");
    if (c.neurons.empty()) throw std::invalid_argument("no neurons selected");
    if (!(c.duration_margin >= 1.0)) throw std::invalid_argument("duration margin must be >= 1");
    for (double m : c.multipliers) {
        if (!(m >= 0.0) || !std::isfinite(m)) throw std::invalid_argument("dither multipliers must be >= 0");
    }
    for (int k : c.sr_bits) {
        if (k < 1 || k > 32) throw std::invalid_argument("SR bit counts must lie in [1, 32]");
    }
    for (const std::string& n : c.neurons) (void)NeuronParams::preset(n);
    (void)step_count(c.max_reference_ms, c.h_ms);
}

bool cell_is_stochastic(const BackendSpec& backend, const InputSource& input) {
    return backend.is_stochastic() || (input.needs_rng() && input.dither_sd_lsb != 0.0);
}

std::filesystem::path default_output_dir() {
    if (const char* env = std::getenv("FIXSR_OUTPUT_DIR"); env != nullptr && *env != '\0') return env;
    return "results";
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& task) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    task(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    next = count;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

namespace {

struct CellSpec {
    SolverKind solver;
    std::string neuron;
    BackendSpec backend;
    InputSource input;
};

// The reference never sees dither.
InputSource undithered(const InputSource& in) {
    return in.kind == InputKind::dithered_dc ? InputSource::dc(in.amplitude) : in;
}

std::vector<ReferenceTrain> compute_references(const StudyConfig& cfg) {
    std::vector<ReferenceTrain> refs;
    for (SolverKind s : cfg.solvers) {
        for (const std::string& n : cfg.neurons) refs.push_back({s, n, {}});
    }
    parallel_for(refs.size(), cfg.threads, [&](std::size_t i) {
        SimulationConfig sc;
        sc.duration_ms = cfg.max_reference_ms;
        sc.h_ms = cfg.h_ms;
        sc.params = NeuronParams::preset(refs[i].neuron);
        sc.input = undithered(cfg.input);
        sc.solver = refs[i].solver;
        sc.max_spikes = cfg.spikes;
        sc.prng = cfg.prng;
        BackendSpec ref = BackendSpec::binary64();
        ref.constants = cfg.constants;
        SimulationResult r = simulate(sc, ref, cfg.base_seed);
        if (r.spike_times_ms.size() < cfg.spikes) {
            throw std::runtime_error("reference " + std::string(to_string(refs[i].solver)) + "/" + refs[i].neuron +
                                     " produced only " + std::to_string(r.spike_times_ms.size()) + " spikes");
        }
        refs[i].spikes = std::move(r.spike_times_ms);
    });
    return refs;
}

const ReferenceTrain& find_reference(const std::vector<ReferenceTrain>& refs, SolverKind s, const std::string& n) {
    for (const ReferenceTrain& r : refs) {
        if (r.solver == s && r.neuron == n) return r;
    }
    throw std::logic_error("missing reference train");
}

std::vector<LagSeries> run_cells(const StudyConfig& cfg, const std::vector<ReferenceTrain>& refs,
                                 const std::vector<CellSpec>& cells) {
    struct Task {
        std::size_t cell;
        std::size_t run;
    };
    std::vector<Task> tasks;
    std::vector<std::size_t> runs(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
        runs[c] = cell_is_stochastic(cells[c].backend, cells[c].input) ? cfg.repeats : 1;
        for (std::size_t r = 0; r < runs[c]; ++r) tasks.push_back({c, r});
    }

    std::vector<SpikeTrain> trains(tasks.size());
    parallel_for(tasks.size(), cfg.threads, [&](std::size_t i) {
        const CellSpec& cell = cells[tasks[i].cell];
        const ReferenceTrain& ref = find_reference(refs, cell.solver, cell.neuron);
        SimulationConfig sc;
        const double horizon = ref.spikes[cfg.spikes - 1] * cfg.duration_margin;
        sc.duration_ms = std::ceil(horizon / cfg.h_ms) * cfg.h_ms;
        sc.h_ms = cfg.h_ms;
        sc.params = NeuronParams::preset(cell.neuron);
        sc.input = cell.input;
        sc.solver = cell.solver;
        sc.max_spikes = cfg.spikes;
        sc.prng = cfg.prng;
        BackendSpec b = cell.backend;
        b.constants = cfg.constants;
        trains[i] = simulate(sc, b, cfg.base_seed + tasks[i].run).spike_times_ms;
    });

    std::vector<LagSeries> out(cells.size());
    std::size_t t = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        LagSeries& s = out[c];
        s.solver = cells[c].solver;
        s.neuron = cells[c].neuron;
        s.backend = cells[c].backend.name();
        s.runs = runs[c];
        const ReferenceTrain& ref = find_reference(refs, s.solver, s.neuron);
        std::vector<std::vector<double>> lags;
        for (std::size_t r = 0; r < runs[c]; ++r, ++t) {
            const SpikeTrain& train = trains[t];
            if (r == 0) s.first_run = train;
            s.spike_counts.push_back(train.size());
            lags.push_back(train.empty() ? std::vector<double>{} : spike_lag(train, ref.spikes, cfg.spikes));
        }
        s.per_spike.resize(cfg.spikes);
        std::vector<double> column;
        for (std::size_t k = 0; k < cfg.spikes; ++k) {
            column.clear();
            for (const auto& l : lags) {
                if (k < l.size()) column.push_back(l[k]);
            }
            s.per_spike[k] = summarize(column);
        }
    }
    return out;
}

}  // namespace

LagStudy run_lag_study(const StudyConfig& cfg) {
    validate(cfg);
    if (cfg.backends.empty()) throw std::invalid_argument("no backends selected");
    LagStudy study;
    study.references = compute_references(cfg);
    std::vector<CellSpec> cells;
    for (SolverKind s : cfg.solvers) {
        for (const std::string& n : cfg.neurons) {
            for (const BackendSpec& b : cfg.backends) cells.push_back({s, n, b, cfg.input});
        }
    }
    study.cells = run_cells(cfg, study.references, cells);
    return study;
}

std::vector<SrBitsRow> run_sr_bits_sweep(const StudyConfig& cfg) {
    validate(cfg);
    const auto refs = compute_references(cfg);
    std::vector<CellSpec> cells;
    for (SolverKind s : cfg.solvers) {
        for (const std::string& n : cfg.neurons) {
            for (int k : cfg.sr_bits) cells.push_back({s, n, BackendSpec::fxp32(RoundingSpec::sr(k)), cfg.input});
        }
    }
    const auto series = run_cells(cfg, refs, cells);
    std::vector<SrBitsRow> rows;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        rows.push_back({cells[i].solver, cells[i].neuron, cells[i].backend.rounding.sr_bits,
                        series[i].at(cfg.spikes)});
    }
    return rows;
}

std::vector<DitherRow> run_dither_sweep(const StudyConfig& cfg) {
    validate(cfg);
    std::vector<BackendSpec> backends = cfg.backends;
    if (backends.empty()) {
        backends = {BackendSpec::binary64(), BackendSpec::binary32(), BackendSpec::fxp32(RoundingSpec::rn()),
                    BackendSpec::fxp32(RoundingSpec::sr())};
    }
    const auto refs = compute_references(cfg);
    std::vector<CellSpec> cells;
    std::vector<double> mult;
    for (SolverKind s : cfg.solvers) {
        for (const std::string& n : cfg.neurons) {
            for (const BackendSpec& b : backends) {
                for (double m : cfg.multipliers) {
                    cells.push_back({s, n, b, InputSource::dithered(cfg.input.amplitude, m)});
                    mult.push_back(m);
                }
            }
        }
    }
    const auto series = run_cells(cfg, refs, cells);
    std::vector<DitherRow> rows;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        rows.push_back({cells[i].solver, cells[i].neuron, series[i].backend, mult[i], series[i].at(cfg.spikes)});
    }
    return rows;
}

std::vector<BedSummary> run_bed_suite(std::size_t n, std::uint64_t seed, PrngKind prng, unsigned threads) {
    const RoundingSpec modes[] = {RoundingSpec::rd(), RoundingSpec::rn(), RoundingSpec::sr()};
    std::vector<BedConfig> configs;
    for (const MulCase& mc : supported_mul_cases) {
        for (RoundingSpec m : modes) {
            BedConfig c;
            c.mul_case = mc;
            c.mode = m;
            c.n = n;
            c.seed = seed;
            c.prng = prng;
            configs.push_back(c);
        }
    }
    std::vector<BedSummary> out(configs.size());
    parallel_for(configs.size(), threads, [&](std::size_t i) { out[i] = run_bed(configs[i]); });
    return out;
}

void write_lag_csv(std::ostream& os, const LagStudy& study) {
    os << "solver,neuron,backend,spike_index,mean_lag_ms,sd_ms,n_runs\n";
    for (const LagSeries& s : study.cells) {
        for (std::size_t k = 0; k < s.per_spike.size(); ++k) {
            const LagStat& st = s.per_spike[k];
            os << to_string(s.solver) << ',' << s.neuron << ',' << s.backend << ',' << (k + 1) << ','
               << csv_num(st.mean) << ',' << csv_num(st.sd) << ',' << st.n_runs << '\n';
        }
    }
}

void write_spike_csv(std::ostream& os, const SpikeTrain& spikes) {
    os << "spike_index,t_ms\n";
    for (std::size_t i = 0; i < spikes.size(); ++i) os << (i + 1) << ',' << csv_num(spikes[i]) << '\n';
}

void write_sr_bits_csv(std::ostream& os, const std::vector<SrBitsRow>& rows) {
    os << "solver,neuron,k_bits,mean_lag650_ms,sd_ms\n";
    for (const SrBitsRow& r : rows) {
        os << to_string(r.solver) << ',' << r.neuron << ',' << r.k_bits << ',' << csv_num(r.lag650.mean) << ','
           << csv_num(r.lag650.sd) << '\n';
    }
}

void write_dither_csv(std::ostream& os, const std::vector<DitherRow>& rows) {
    os << "solver,neuron,backend,multiplier,mean_lag650_ms,sd_ms\n";
    for (const DitherRow& r : rows) {
        os << to_string(r.solver) << ',' << r.neuron << ',' << r.backend << ',' << csv_num(r.multiplier) << ','
           << csv_num(r.lag650.mean) << ',' << csv_num(r.lag650.sd) << '\n';
    }
}

void write_trace_csv(std::ostream& os, const std::vector<TracePoint>& trace) {
    os << "t_ms,v,u\n";
    for (const TracePoint& p : trace) os << csv_num(p.t_ms) << ',' << csv_num(p.v) << ',' << csv_num(p.u) << '\n';
}

}  // namespace fixsr
