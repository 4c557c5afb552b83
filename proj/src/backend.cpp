#include "fixsr/backend.hpp"

namespace fixsr {

std::string_view to_string(ConstantSource source) {
    switch (source) {
        case ConstantSource::exact: return "exact";
        case ConstantSource::float32: return "float";
        case ConstantSource::fxp16: return "fxp16";
    }
    return "?";
}

ConstantSource parse_constant_source(std::string_view text) {
    if (text == "exact") return ConstantSource::exact;
    if (text == "float" || text == "float32") return ConstantSource::float32;
    if (text == "fxp16") return ConstantSource::fxp16;
    throw std::invalid_argument("unknown constant source '" + std::string(text) + "'");
}

std::string BackendSpec::name() const {
    std::string n;
    switch (kind) {
        case BackendKind::binary64: n = "double"; break;
        case BackendKind::binary32: n = "single"; break;
        case BackendKind::fxp32: n = "fxp32:" + rounding.name(); break;
        case BackendKind::fxp16: n = "fxp16:" + rounding.name(); break;
    }
    if (policy == ConstantPolicy::stochastic_select) n += "+sc";
    return n;
}

BackendSpec BackendSpec::parse(std::string_view text) {
    BackendSpec spec;
    if (text.ends_with("+sc")) {
        spec.policy = ConstantPolicy::stochastic_select;
        text.remove_suffix(3);
    }
    if (text == "double" || text == "binary64") {
        spec.kind = BackendKind::binary64;
    } else if (text == "single" || text == "float" || text == "binary32") {
        spec.kind = BackendKind::binary32;
    } else if (text.starts_with("fxp32:") || text.starts_with("fxp16:")) {
        spec.kind = text.starts_with("fxp32") ? BackendKind::fxp32 : BackendKind::fxp16;
        spec.rounding = RoundingSpec::parse(text.substr(6));
    } else {
        throw std::invalid_argument("unknown backend '" + std::string(text) +
                                    "' (expected double, single, fxp32:<mode> or fxp16:<mode>)");
    }
    if (spec.policy == ConstantPolicy::stochastic_select && !spec.is_fixed()) {
        throw std::invalid_argument("stochastic constant selection needs a fixed-point backend");
    }
    return spec;
}

namespace {

double quantise(double x, bool is_coef, ConstantSource source) {
    switch (source) {
        case ConstantSource::exact: return x;
        case ConstantSource::float32: return static_cast<double>(static_cast<float>(x));
        case ConstantSource::fxp16: return to_real(from_real(x, is_coef ? u0_16 : s8_7, RoundingSpec::rn()));
    }
    return x;
}

}  // namespace

ConstantValues make_constant_values(const NeuronParams& p, double h, ConstantSource source) {
    auto qc = [&](double x) { return quantise(x, true, source); };
    auto qv = [&](double x) { return quantise(x, false, source); };

    ConstantValues k;
    k.k004 = qc(0.04);
    k.a = qc(p.a);
    k.b = qc(p.b);
    k.h = qc(h);
    k.five = qv(5.0);
    k.c140 = qv(140.0);
    k.threshold = qv(p.threshold);
    k.reset_v = qv(p.c);
    k.reset_inc = qv(p.d);

    const double hq = k.h;
    const double ha = k.h * k.a;
    k.h_half = qc(hq / 2.0);
    k.h_third = qc(hq / 3.0);
    k.h_two_thirds = qc(2.0 * hq / 3.0);
    k.h_quarter = qc(hq / 4.0);
    k.h_three_quarters = qc(3.0 * hq / 4.0);
    k.h2_eighth = qc(hq * hq / 8.0);
    k.h2_sixth = qc(hq * hq / 6.0);
    k.h2_third = qc(hq * hq / 3.0);
    k.ha = qc(ha);
    k.ha_half = qc(ha / 2.0);
    k.ha_third = qc(ha / 3.0);
    k.ha_two_thirds = qc(2.0 * ha / 3.0);
    k.ha_quarter = qc(ha / 4.0);
    k.ha_three_quarters = qc(3.0 * ha / 4.0);
    return k;
}

}  // namespace fixsr
