#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fixsr/backend.hpp"
#include "fixsr/izhikevich.hpp"
#include "fixsr/random.hpp"

namespace fixsr {

enum class SolverKind { rk2_midpoint, rk2_trapezoid, rk3_heun, chan_tsai };

inline constexpr std::array<SolverKind, 4> all_solvers = {SolverKind::rk2_midpoint, SolverKind::rk2_trapezoid,
                                                          SolverKind::rk3_heun, SolverKind::chan_tsai};

// "rk2mid", "rk2trap", "rk3heun", "chantsai"
std::string_view to_string(SolverKind kind);
SolverKind parse_solver(std::string_view text);

/// Rounding points (multiplies plus accumulator read-outs) in one step.
constexpr int roundings_per_step(SolverKind kind) {
    switch (kind) {
        case SolverKind::rk2_midpoint: return 10;
        case SolverKind::rk2_trapezoid: return 10;
        case SolverKind::rk3_heun: return 15;
        case SolverKind::chan_tsai: return 18;
    }
    return 0;
}

/*
 * Explicit-solver-reduction forms. Each solver's stages are unrolled into a
 * single update in (v, u, I) with every coefficient folded into one
 * precomputed constant. Throughout, F = 0.04 v^2 + 5 v + 140 - u + I is
 * evaluated as ((5 + 0.04 v) v + 140 - u) + I and G / a = b v - u. Adds are
 * exact in fixed point, so their order only matters for the IEEE backends.
 *
 * Operands are ordered so that a fraction constant multiplies a state value
 * (u0.32 x s16.15 in the 32-bit backend). Rounding points are numbered in
 * evaluation order, which is also the SR draw order.
 */
namespace esr {

template <class A>
using StateOf = NeuronState<typename A::Val>;

// F(x, w) with 2 rounding points: 0.04 x and the product with x.
template <class A>
typename A::Val rhs_v(typename A::Val x, typename A::Val w, typename A::Val input, const typename A::Constants& k,
                      A& ar) {
    const auto quad = ar.mul(ar.add(k.five, ar.scale(k.k004, x)), x);
    return ar.add(ar.sub(ar.add(quad, k.c140), w), input);
}

// RK2 midpoint: y' = y + h f(y + h/2 f(y)). 10 rounding points.
template <class A>
StateOf<A> rk2_midpoint(const StateOf<A>& s, typename A::Val input, const typename A::Constants& k, A& ar) {
    const auto v = s.v;
    const auto u = s.u;
    const auto alpha = rhs_v(v, u, input, k, ar);                                 // #1 #2
    const auto eta = ar.add(v, ar.scale(k.h_half, alpha));                        // #3: v at midpoint
    const auto u_mid = ar.add(u, ar.scale(k.ha_half, ar.sub(ar.scale(k.b, v), u)));  // #4 #5
    const auto f_mid = rhs_v(eta, u_mid, input, k, ar);                           // #6 #7
    const auto v_next = ar.add(v, ar.scale(k.h, f_mid));                          // #8
    const auto u_next = ar.add(u, ar.scale(k.ha, ar.sub(ar.scale(k.b, eta), u_mid)));  // #9 #10
    return {v_next, u_next};
}

// RK2 trapezoid (Heun): y' = y + h/2 (f(y) + f(y + h f(y))). 10 rounding points.
template <class A>
StateOf<A> rk2_trapezoid(const StateOf<A>& s, typename A::Val input, const typename A::Constants& k, A& ar) {
    const auto v = s.v;
    const auto u = s.u;
    const auto alpha = rhs_v(v, u, input, k, ar);                 // #1 #2
    const auto eta = ar.add(v, ar.scale(k.h, alpha));             // #3: Euler predictor
    const auto g0 = ar.sub(ar.scale(k.b, v), u);                  // #4
    const auto u_end = ar.add(u, ar.scale(k.ha, g0));             // #5
    const auto f_end = rhs_v(eta, u_end, input, k, ar);           // #6 #7
    const auto v_next = ar.add(v, ar.scale(k.h_half, ar.add(alpha, f_end)));  // #8
    const auto g_end = ar.sub(ar.scale(k.b, eta), u_end);         // #9
    const auto u_next = ar.add(u, ar.scale(k.ha_half, ar.add(g0, g_end)));    // #10
    return {v_next, u_next};
}

// Heun's third-order method: c = (0, 1/3, 2/3), b = (1/4, 0, 3/4). The final
// combinations are accumulated at full precision and rounded once.
// 15 rounding points.
template <class A>
StateOf<A> rk3_heun(const StateOf<A>& s, typename A::Val input, const typename A::Constants& k, A& ar) {
    const auto v = s.v;
    const auto u = s.u;
    const auto f1 = rhs_v(v, u, input, k, ar);              // #1 #2
    const auto g1 = ar.sub(ar.scale(k.b, v), u);            // #3
    const auto v2 = ar.add(v, ar.scale(k.h_third, f1));     // #4
    const auto u2 = ar.add(u, ar.scale(k.ha_third, g1));    // #5
    const auto f2 = rhs_v(v2, u2, input, k, ar);            // #6 #7
    const auto g2 = ar.sub(ar.scale(k.b, v2), u2);          // #8
    const auto v3 = ar.add(v, ar.scale(k.h_two_thirds, f2));   // #9
    const auto u3 = ar.add(u, ar.scale(k.ha_two_thirds, g2));  // #10
    const auto f3 = rhs_v(v3, u3, input, k, ar);            // #11 #12
    const auto g3 = ar.sub(ar.scale(k.b, v3), u3);          // #13
    const auto dv = ar.round(ar.mac(ar.prod(k.h_quarter, f1), k.h_three_quarters, f3));   // #14
    const auto du = ar.round(ar.mac(ar.prod(k.ha_quarter, g1), k.ha_three_quarters, g3)); // #15
    return {ar.add(v, dv), ar.add(u, du)};
}

/*
 * Two-stage, fourth-order two-derivative Runge-Kutta method:
 *   Y  = y + h/2 f(y) + h^2/8 g(y)
 *   y' = y + h f(y) + h^2 (g(y)/6 + g(Y)/3)
 * with g = J f the second derivative:
 *   g_v = (0.08 v + 5) F - G,   g_u = a (b F - G).
 * 18 rounding points.
 */
template <class A>
StateOf<A> chan_tsai(const StateOf<A>& s, typename A::Val input, const typename A::Constants& k, A& ar) {
    struct Stage {
        typename A::Val f, g, gv, gu;
    };
    // 7 rounding points per stage evaluation.
    auto stage = [&](typename A::Val v, typename A::Val u) {
        const auto q = ar.scale(k.k004, v);  // 0.04 v
        const auto f = ar.add(ar.sub(ar.add(ar.mul(ar.add(k.five, q), v), k.c140), u), input);
        const auto g = ar.scale(k.a, ar.sub(ar.scale(k.b, v), u));
        const auto gv = ar.sub(ar.mul(ar.add(ar.add(q, q), k.five), f), g);
        const auto gu = ar.scale(k.a, ar.sub(ar.scale(k.b, f), g));
        return Stage{f, g, gv, gu};
    };

    const Stage s1 = stage(s.v, s.u);
    const auto vy = ar.add(s.v, ar.round(ar.mac(ar.prod(k.h_half, s1.f), k.h2_eighth, s1.gv)));
    const auto uy = ar.add(s.u, ar.round(ar.mac(ar.prod(k.h_half, s1.g), k.h2_eighth, s1.gu)));
    const Stage s2 = stage(vy, uy);
    const auto dv = ar.round(ar.mac(ar.mac(ar.prod(k.h, s1.f), k.h2_sixth, s1.gv), k.h2_third, s2.gv));
    const auto du = ar.round(ar.mac(ar.mac(ar.prod(k.h, s1.g), k.h2_sixth, s1.gu), k.h2_third, s2.gu));
    return {ar.add(s.v, dv), ar.add(s.u, du)};
}

}  // namespace esr

/// One explicit step of `kind` evaluated through arithmetic backend `ar`.
template <class A>
NeuronState<typename A::Val> esr_step(SolverKind kind, const NeuronState<typename A::Val>& s,
                                      typename A::Val input, const typename A::Constants& k, A& ar) {
    switch (kind) {
        case SolverKind::rk2_midpoint: return esr::rk2_midpoint(s, input, k, ar);
        case SolverKind::rk2_trapezoid: return esr::rk2_trapezoid(s, input, k, ar);
        case SolverKind::rk3_heun: return esr::rk3_heun(s, input, k, ar);
        case SolverKind::chan_tsai: return esr::chan_tsai(s, input, k, ar);
    }
    return s;
}

/// Threshold/reset through a backend: v >= threshold -> v = c, u += d.
template <class A>
bool apply_reset(NeuronState<typename A::Val>& s, const typename A::Constants& k, A& ar) {
    if (!ar.ge(s.v, k.threshold)) return false;
    s.v = k.reset_v;
    s.u = ar.add(s.u, k.reset_inc);
    return true;
}

struct TracePoint {
    double t_ms = 0.0;
    double v = 0.0;
    double u = 0.0;
};

struct SimulationConfig {
    double duration_ms = 1000.0;
    double h_ms = 0.1;
    NeuronParams params = NeuronParams::regular_spiking();
    InputSource input = InputSource::dc(4.775);
    SolverKind solver = SolverKind::rk2_midpoint;
    // Stop once this many spikes have been recorded.
    std::optional<std::size_t> max_spikes;
    bool record_trace = false;
    PrngKind prng = PrngKind::kiss99;
};

struct SimulationResult {
    // Spikes are stamped k * h at the end of the step whose update crossed
    // the threshold.
    std::vector<std::int64_t> spike_steps;
    std::vector<double> spike_times_ms;
    std::vector<TracePoint> trace;
    std::uint64_t steps = 0;
    std::uint64_t rounding_points = 0;
    // Random words taken by SR rounding points (0 for deterministic backends).
    std::uint64_t rounding_draws = 0;
    std::uint64_t total_draws = 0;
    std::uint64_t saturations = 0;
};

/// Bit-deterministic for a fixed (config, backend, seed).
SimulationResult simulate(const SimulationConfig& config, const BackendSpec& backend, std::uint64_t seed);

/// Step count for a duration; throws unless duration / h is integral.
std::int64_t step_count(double duration_ms, double h_ms);

}  // namespace fixsr
