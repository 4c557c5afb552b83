#include "fixsr/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <type_traits>
#include <variant>

namespace fixsr {

std::string_view to_string(SolverKind kind) {
    switch (kind) {
        case SolverKind::rk2_midpoint: return "rk2mid";
        case SolverKind::rk2_trapezoid: return "rk2trap";
        case SolverKind::rk3_heun: return "rk3heun";
        case SolverKind::chan_tsai: return "chantsai";
    }
    return "?";
}

SolverKind parse_solver(std::string_view text) {
    for (SolverKind k : all_solvers) {
        if (text == to_string(k)) return k;
    }
    throw std::invalid_argument("unknown solver '" + std::string(text) +
                                "' (expected rk2mid, rk2trap, rk3heun or chantsai)");
}

std::int64_t step_count(double duration_ms, double h_ms) {
    if (!(h_ms > 0.0) || !std::isfinite(h_ms)) throw std::invalid_argument("timestep must be positive");
    if (!(duration_ms >= 0.0) || !std::isfinite(duration_ms)) throw std::invalid_argument("duration must be >= 0");
    const double ratio = duration_ms / h_ms;
    const double n = std::nearbyint(ratio);
    if (std::abs(ratio - n) > 1e-9 * std::max(1.0, ratio)) {
        throw std::invalid_argument("duration is not an integral number of timesteps");
    }
    return static_cast<std::int64_t>(n);
}

namespace {

template <class A>
inline constexpr bool is_fixed_arith = !std::is_floating_point_v<typename A::Val>;

template <class A>
SimulationResult run(const SimulationConfig& cfg, A& ar, const ConstantValues& values, ConstantPolicy policy,
                     RandomStream& rng) {
    const std::int64_t n = step_count(cfg.duration_ms, cfg.h_ms);
    const typename A::Constants fixed_k = ar.make_constants(values);

    // Stochastic selection only exists for fixed-point backends.
    using Stochastic = std::conditional_t<is_fixed_arith<A>, StochasticConstants<A>, std::monostate>;
    std::optional<Stochastic> stochastic;
    if (policy == ConstantPolicy::stochastic_select) {
        if constexpr (is_fixed_arith<A>) {
            stochastic.emplace(ar, values);
        } else {
            throw std::invalid_argument("stochastic constant selection needs a fixed-point backend");
        }
    }
    auto constants_for_step = [&]() -> const typename A::Constants& {
        if constexpr (is_fixed_arith<A>) {
            if (stochastic) return stochastic->draw(rng);
        }
        return fixed_k;
    };

    const NeuronState<double> s0 = initial_state(cfg.params);
    NeuronState<typename A::Val> s{ar.val_from_real(s0.v), ar.val_from_real(s0.u)};

    const bool constant_input = cfg.input.kind == InputKind::dc ||
                                (cfg.input.kind == InputKind::dithered_dc && cfg.input.dither_sd_lsb == 0.0);
    const typename A::Val dc_input = ar.val_from_real(cfg.input.amplitude);
    const double threshold_real = ar.to_real(fixed_k.threshold);

    SimulationResult out;
    if (cfg.record_trace) out.trace.reserve(static_cast<std::size_t>(n));
    const std::size_t spike_cap = cfg.max_spikes.value_or(static_cast<std::size_t>(-1));

    std::int64_t step = 0;
    while (step < n && out.spike_steps.size() < spike_cap) {
        const double t = static_cast<double>(step) * cfg.h_ms;
        const typename A::Val input =
            constant_input ? dc_input : ar.val_from_real(sample_input(cfg.input, t, &rng));
        const typename A::Constants& k = constants_for_step();

        s = esr_step(cfg.solver, s, input, k, ar);
        const double v_pre = ar.to_real(s.v);
        const bool spiked = apply_reset(s, k, ar);
        ++step;
        if (spiked) {
            out.spike_steps.push_back(step);
            out.spike_times_ms.push_back(static_cast<double>(step) * cfg.h_ms);
        }
        if (cfg.record_trace) {
            const double v_log = spiked ? std::min(v_pre, threshold_real) : ar.to_real(s.v);
            out.trace.push_back({static_cast<double>(step) * cfg.h_ms, v_log, ar.to_real(s.u)});
        }
    }

    out.steps = static_cast<std::uint64_t>(step);
    out.rounding_points = ar.roundings();
    out.saturations = ar.saturations();
    out.total_draws = rng.draws_made();
    return out;
}

template <class A>
SimulationResult run_fixed(const SimulationConfig& cfg, const BackendSpec& backend, const ConstantValues& values,
                           RandomStream& rng) {
    A ar(backend.rounding, &rng);
    SimulationResult r = run(cfg, ar, values, backend.policy, rng);
    if (backend.rounding.is_stochastic()) r.rounding_draws = r.rounding_points;
    return r;
}

}  // namespace

SimulationResult simulate(const SimulationConfig& config, const BackendSpec& backend, std::uint64_t seed) {
    RandomStream rng = RandomStream::from_seed(config.prng, seed);
    const ConstantValues values = make_constant_values(config.params, config.h_ms, backend.constants);
    switch (backend.kind) {
        case BackendKind::binary64: {
            DoubleArith ar;
            return run(config, ar, values, backend.policy, rng);
        }
        case BackendKind::binary32: {
            SingleArith ar;
            return run(config, ar, values, backend.policy, rng);
        }
        case BackendKind::fxp32: return run_fixed<Fxp32Arith>(config, backend, values, rng);
        case BackendKind::fxp16: return run_fixed<Fxp16Arith>(config, backend, values, rng);
    }
    throw std::invalid_argument("unknown backend kind");
}

}  // namespace fixsr
