#pragma once

#include <cmath>
#include <cstdint>
#include <type_traits>
#include <string>
#include <string_view>
#include <vector>

#include "fixsr/format.hpp"
#include "fixsr/izhikevich.hpp"
#include "fixsr/random.hpp"
#include "fixsr/rounding.hpp"

namespace fixsr {

enum class BackendKind { binary64, binary32, fxp32, fxp16 };

// Precision the constants are specified in before each backend converts them
// to its own representation.
enum class ConstantSource { exact, float32, fxp16 };

// Stochastic selection re-rounds every constant with SR from its precise
// value on each integration step.
enum class ConstantPolicy { deterministic, stochastic_select };

std::string_view to_string(ConstantSource source);
ConstantSource parse_constant_source(std::string_view text);

struct BackendSpec {
    BackendKind kind = BackendKind::binary64;
    RoundingSpec rounding = RoundingSpec::rn();
    ConstantPolicy policy = ConstantPolicy::deterministic;
    ConstantSource constants = ConstantSource::exact;

    static BackendSpec binary64() { return {BackendKind::binary64, RoundingSpec::rn()}; }
    static BackendSpec binary32() { return {BackendKind::binary32, RoundingSpec::rn()}; }
    static BackendSpec fxp32(RoundingSpec r) { return {BackendKind::fxp32, r}; }
    static BackendSpec fxp16(RoundingSpec r) { return {BackendKind::fxp16, r}; }

    bool is_fixed() const { return kind == BackendKind::fxp32 || kind == BackendKind::fxp16; }
    // True if repeated runs can differ (SR arithmetic or stochastic constants).
    bool is_stochastic() const {
        return is_fixed() && (rounding.is_stochastic() || policy == ConstantPolicy::stochastic_select);
    }

    // "double", "single", "fxp32:rn", "fxp32:sr6", "fxp16:sr"; a "+sc" suffix
    // marks stochastic constant selection.
    std::string name() const;
    static BackendSpec parse(std::string_view text);

    friend bool operator==(const BackendSpec&, const BackendSpec&) = default;
};

/**
 * Every constant appearing in the solver update expressions, as exact
 * reference values for one parameter set and timestep. Fraction constants
 * (all in [0, 1)) are stored as u0.32 / u0.16 in the fixed-point backends;
 * the rest share the state format.
 */
template <class Coef, class Val>
struct ConstantSet {
    // fraction constants
    Coef k004{};            // 0.04
    Coef a{};
    Coef b{};
    Coef h{};
    Coef h_half{};
    Coef h_third{};
    Coef h_two_thirds{};
    Coef h_quarter{};
    Coef h_three_quarters{};
    Coef h2_eighth{};        // h^2 / 8
    Coef h2_sixth{};         // h^2 / 6
    Coef h2_third{};         // h^2 / 3
    Coef ha{};               // h a
    Coef ha_half{};
    Coef ha_third{};
    Coef ha_two_thirds{};
    Coef ha_quarter{};
    Coef ha_three_quarters{};
    // state-format constants
    Val five{};
    Val c140{};
    Val threshold{};
    Val reset_v{};
    Val reset_inc{};

    template <class F>
    void visit(F&& f) {
        visit_impl(*this, f);
    }
    template <class F>
    void visit(F&& f) const {
        visit_impl(*this, f);
    }

private:
    template <class Self, class F>
    static void visit_impl(Self& s, F& f) {
        f("0.04", s.k004, true);
        f("a", s.a, true);
        f("b", s.b, true);
        f("h", s.h, true);
        f("h/2", s.h_half, true);
        f("h/3", s.h_third, true);
        f("2h/3", s.h_two_thirds, true);
        f("h/4", s.h_quarter, true);
        f("3h/4", s.h_three_quarters, true);
        f("h^2/8", s.h2_eighth, true);
        f("h^2/6", s.h2_sixth, true);
        f("h^2/3", s.h2_third, true);
        f("ha", s.ha, true);
        f("ha/2", s.ha_half, true);
        f("ha/3", s.ha_third, true);
        f("2ha/3", s.ha_two_thirds, true);
        f("ha/4", s.ha_quarter, true);
        f("3ha/4", s.ha_three_quarters, true);
        f("5", s.five, false);
        f("140", s.c140, false);
        f("threshold", s.threshold, false);
        f("c", s.reset_v, false);
        f("d", s.reset_inc, false);
    }
};

using ConstantValues = ConstantSet<double, double>;

/// Reference values of all constants, pre-quantised according to `source`.
/// Derived constants (h a / 2, h^2 / 6, ...) are formed from the quantised
/// base constants and then quantised themselves.
ConstantValues make_constant_values(const NeuronParams& p, double h, ConstantSource source);

/// IEEE arithmetic (binary64 or binary32). Every operation rounds per IEEE;
/// the explicit rounding points are no-ops.
template <class T>
class IeeeArith {
public:
    using Val = T;
    using Coef = T;
    using Ext = T;
    using Constants = ConstantSet<Coef, Val>;

    Val add(Val x, Val y) { return x + y; }
    Val sub(Val x, Val y) { return x - y; }
    Val scale(Coef c, Val x) {
        ++roundings_;
        return c * x;
    }
    Val mul(Val x, Val y) {
        ++roundings_;
        return x * y;
    }
    Ext prod(Coef c, Val x) { return c * x; }
    Ext mac(Ext acc, Coef c, Val x) { return acc + c * x; }
    Val round(Ext e) {
        ++roundings_;
        return e;
    }
    bool ge(Val x, Val y) const { return x >= y; }

    Val val_from_real(double x) const { return static_cast<T>(x); }
    Coef coef_from_real(double x) const { return static_cast<T>(x); }
    double to_real(Val x) const { return static_cast<double>(x); }
    double coef_to_real(Coef x) const { return static_cast<double>(x); }

    Constants make_constants(const ConstantValues& values) const {
        Constants k;
        assign(k, values);
        return k;
    }

    std::uint64_t roundings() const { return roundings_; }
    std::uint64_t saturations() const { return 0; }
    static std::string format_name(bool) { return sizeof(T) == 8 ? "binary64" : "binary32"; }

private:
    static void assign(Constants& k, const ConstantValues& v) {
        std::vector<double> flat;
        v.visit([&](const char*, const double& x, bool) { flat.push_back(x); });
        std::size_t i = 0;
        k.visit([&](const char*, T& slot, bool) { slot = static_cast<T>(flat[i++]); });
    }

    std::uint64_t roundings_ = 0;
};

/**
 * Fixed-point arithmetic with state in StateF and fraction constants in
 * CoefF. Adds and subtracts are exact up to saturation; every multiply and
 * every accumulator read-out is a rounding point handled by round_raw.
 */
template <FixedFormat StateF, FixedFormat CoefF>
class FixedArith {
public:
    struct Val {
        std::int64_t raw = 0;
        friend bool operator==(const Val&, const Val&) = default;
    };
    struct Coef {
        std::int64_t raw = 0;
        friend bool operator==(const Coef&, const Coef&) = default;
    };
    struct Ext {
        Wide raw = 0;
    };
    using Constants = ConstantSet<Coef, Val>;

    static constexpr FixedFormat state_format = StateF;
    static constexpr FixedFormat coef_format = CoefF;

    FixedArith(RoundingSpec spec, RandomStream* rng) : spec_(spec), rng_(rng) {
        if (spec.is_stochastic() && rng == nullptr) {
            throw std::invalid_argument("stochastic rounding backend needs a random stream");
        }
    }

    Val add(Val x, Val y) { return {sat(static_cast<Wide>(x.raw) + y.raw)}; }
    Val sub(Val x, Val y) { return {sat(static_cast<Wide>(x.raw) - y.raw)}; }
    Val scale(Coef c, Val x) { return {sat(rnd(static_cast<Wide>(c.raw) * x.raw, CoefF.frac_bits))}; }
    Val mul(Val x, Val y) { return {sat(rnd(static_cast<Wide>(x.raw) * y.raw, StateF.frac_bits))}; }
    Ext prod(Coef c, Val x) { return {static_cast<Wide>(c.raw) * x.raw}; }
    Ext mac(Ext acc, Coef c, Val x) { return {acc.raw + static_cast<Wide>(c.raw) * x.raw}; }
    Val round(Ext e) { return {sat(rnd(e.raw, CoefF.frac_bits))}; }
    bool ge(Val x, Val y) const { return x.raw >= y.raw; }

    // Data conversions (inputs, initial state) always round to nearest.
    Val val_from_real(double x) const { return {from_real(x, StateF, RoundingSpec::rn()).raw()}; }
    Coef coef_from_real(double x) const {
        if (!(x >= 0.0 && x < 1.0)) throw std::invalid_argument("fraction constant outside [0, 1)");
        return {from_real(x, CoefF, RoundingSpec::rn()).raw()};
    }
    double to_real(Val x) const { return std::ldexp(static_cast<double>(x.raw), -StateF.frac_bits); }
    double coef_to_real(Coef x) const { return std::ldexp(static_cast<double>(x.raw), -CoefF.frac_bits); }

    Constants make_constants(const ConstantValues& values) const {
        std::vector<std::pair<double, bool>> flat;
        values.visit([&](const char*, const double& x, bool is_coef) { flat.emplace_back(x, is_coef); });
        Constants k;
        std::size_t i = 0;
        k.visit([&](const char*, auto& slot, bool) {
            const double x = flat[i++].first;
            if constexpr (std::is_same_v<std::decay_t<decltype(slot)>, Coef>) {
                slot = coef_from_real(x);
            } else {
                slot = val_from_real(x);
            }
        });
        return k;
    }

    std::uint64_t roundings() const { return roundings_; }
    std::uint64_t saturations() const { return saturations_; }
    static std::string format_name(bool is_coef) { return is_coef ? CoefF.name() : StateF.name(); }

private:
    Wide rnd(Wide x, int discard) {
        ++roundings_;
        return round_raw(x, discard, spec_, rng_);
    }
    std::int64_t sat(Wide x) {
        bool flag = false;
        const std::int64_t r = saturate_raw(x, StateF, &flag);
        saturations_ += flag ? 1 : 0;
        return r;
    }

    RoundingSpec spec_;
    RandomStream* rng_;
    std::uint64_t roundings_ = 0;
    std::uint64_t saturations_ = 0;
};

using DoubleArith = IeeeArith<double>;
using SingleArith = IeeeArith<float>;
using Fxp32Arith = FixedArith<s16_15, u0_32>;
using Fxp16Arith = FixedArith<s8_7, u0_16>;

/**
 * Per-step stochastic re-selection of the fixed-point constants: each
 * constant is rounded with SR from its precise value (32 guard bits), so it
 * takes one of its two neighbouring grid values with probability set by the
 * residual. One draw per constant per step, in declaration order.
 */
template <class A>
class StochasticConstants {
public:
    StochasticConstants(const A& ar, const ConstantValues& values) {
        values.visit([&](const char*, const double& x, bool is_coef) {
            const FixedFormat f = is_coef ? A::coef_format : A::state_format;
            precise_.push_back(static_cast<Wide>(std::floor(std::ldexp(x, f.frac_bits + guard))));
            formats_.push_back(f);
        });
        current_ = ar.make_constants(values);
    }

    const typename A::Constants& draw(RandomStream& rng) {
        std::size_t i = 0;
        current_.visit([&](const char*, auto& slot, bool) {
            const Wide r = round_raw(precise_[i], guard, RoundingSpec::sr(), &rng);
            slot.raw = saturate_raw(r, formats_[i]);
            ++i;
        });
        return current_;
    }

private:
    static constexpr int guard = 32;
    std::vector<Wide> precise_;
    std::vector<FixedFormat> formats_;
    typename A::Constants current_;
};

}  // namespace fixsr
