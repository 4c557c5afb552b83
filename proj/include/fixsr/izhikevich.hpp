#pragma once

#include <string>
#include <string_view>
#include <utility>

#include "fixsr/random.hpp"

namespace fixsr {

/// Izhikevich neuron: v' = 0.04 v^2 + 5 v + 140 - u + I, u' = a (b v - u);
/// when v >= threshold the state resets to v = c, u = u + d.
struct NeuronParams {
    double a = 0.02;
    double b = 0.2;
    double c = -65.0;
    double d = 8.0;
    double threshold = 30.0;

    static NeuronParams regular_spiking() { return {0.02, 0.2, -65.0, 8.0, 30.0}; }
    static NeuronParams chattering() { return {0.02, 0.2, -50.0, 2.0, 30.0}; }
    static NeuronParams fast_spiking() { return {0.1, 0.2, -65.0, 2.0, 30.0}; }

    // "RS", "CH", "FS"
    static NeuronParams preset(std::string_view name);

    friend bool operator==(const NeuronParams&, const NeuronParams&) = default;
};

template <class T>
struct NeuronState {
    T v{};
    T u{};
};

// Initial condition shared by every backend: v0 = c, u0 = b * c.
NeuronState<double> initial_state(const NeuronParams& p);

struct Derivative {
    double dv = 0.0;
    double du = 0.0;
};

Derivative derivative(const NeuronState<double>& s, double input, const NeuronParams& p);

/// Threshold/reset event. Returns true if the neuron spiked.
bool apply_reset(NeuronState<double>& s, const NeuronParams& p);

enum class InputKind { dc, exponential_decay, dithered_dc };

/**
 * Input current (nA). The dithered source adds N(0, (dither_sd * 2^-15)^2)
 * per step, i.e. dither_sd is expressed in s16.15 LSBs.
 */
struct InputSource {
    InputKind kind = InputKind::dc;
    double amplitude = 4.775;
    double decay_tau_ms = 0.0;
    double dither_sd_lsb = 0.0;

    static InputSource dc(double amplitude) { return {InputKind::dc, amplitude, 0.0, 0.0}; }
    static InputSource exponential(double amplitude, double tau_ms) {
        return {InputKind::exponential_decay, amplitude, tau_ms, 0.0};
    }
    static InputSource dithered(double amplitude, double sd_lsb) {
        return {InputKind::dithered_dc, amplitude, 0.0, sd_lsb};
    }

    bool needs_rng() const { return kind == InputKind::dithered_dc; }
};

double sample_input(const InputSource& source, double t_ms, RandomStream* rng = nullptr);

}  // namespace fixsr
