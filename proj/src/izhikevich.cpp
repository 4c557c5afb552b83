#include "fixsr/izhikevich.hpp"

#include <cmath>
#include <stdexcept>

namespace fixsr {

NeuronParams NeuronParams::preset(std::string_view name) {
    if (name == "RS" || name == "rs") return regular_spiking();
    if (name == "CH" || name == "ch") return chattering();
    if (name == "FS" || name == "fs") return fast_spiking();
    throw std::invalid_argument("unknown neuron preset '" + std::string(name) + "' (expected RS, CH or FS)");
}

NeuronState<double> initial_state(const NeuronParams& p) { return {p.c, p.b * p.c}; }

Derivative derivative(const NeuronState<double>& s, double input, const NeuronParams& p) {
    return {0.04 * s.v * s.v + 5.0 * s.v + 140.0 - s.u + input, p.a * (p.b * s.v - s.u)};
}

bool apply_reset(NeuronState<double>& s, const NeuronParams& p) {
    if (s.v < p.threshold) return false;
    s.v = p.c;
    s.u += p.d;
    return true;
}

double sample_input(const InputSource& source, double t_ms, RandomStream* rng) {
    switch (source.kind) {
        case InputKind::dc:
            return source.amplitude;
        case InputKind::exponential_decay:
            if (source.decay_tau_ms <= 0.0) throw std::invalid_argument("exponential input needs tau > 0");
            return source.amplitude * std::exp(-t_ms / source.decay_tau_ms);
        case InputKind::dithered_dc:
            if (rng == nullptr) throw std::invalid_argument("dithered input needs a random stream");
            if (source.dither_sd_lsb == 0.0) return source.amplitude;
            return source.amplitude + rng->next_gaussian() * source.dither_sd_lsb * 0x1p-15;
    }
    return source.amplitude;
}

}  // namespace fixsr
