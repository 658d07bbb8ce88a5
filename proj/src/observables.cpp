#include "vacmech/observables.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace vacmech {
namespace {

constexpr double kTwoPi = 2.0 * kPi;

// d/dw [w coth(w/2T)] = coth(x) - x / sinh(x)^2 with x = w/2T.
double energy_weight_derivative(double omega, const ThermalState& th) {
    if (th.is_vacuum()) return 1.0;
    const double x = omega / (2.0 * th.temperature);
    if (x < 1e-2) return 2.0 * x / 3.0 - 4.0 * x * x * x / 45.0;
    if (x > 350.0) return 1.0;
    const double sh = std::sinh(x);
    return 1.0 / std::tanh(x) - x / (sh * sh);
}

// w coth(w/2T), finite (2T) at w = 0.
double weighted_frequency(double omega, const ThermalState& th) {
    if (th.is_vacuum()) return omega;
    const double x = omega / (2.0 * th.temperature);
    if (x < 1e-8) return 2.0 * th.temperature;
    if (x > 350.0) return omega;
    return omega / std::tanh(x);
}

IntegralResult spectral_integral(const Cavity& cavity, const ThermalState& thermal, const QuadratureSpec& spec,
                                 const RealFunction& integrand) {
    spec.validate();
    thermal.validate();
    if (!cavity.is_high_frequency_transparent())
        throw UnsupportedModelError(
            "real-frequency integrals need mirrors that become transparent at high frequency "
            "(constant_lossy requires a finite cutoff)");

    const double q = cavity.length();
    const double crossover = cavity.crossover();
    const bool aware = spec.segmentation == Segmentation::ResonanceAware;
    std::vector<double> markers = phase_markers(cavity, crossover, aware);
    if (!thermal.is_vacuum())
        for (double f : {0.1, 0.3, 1.0, 3.0, 10.0, 30.0, 100.0})
            if (f * thermal.temperature < crossover) markers.push_back(f * thermal.temperature);
    std::sort(markers.begin(), markers.end());

    const double cutoff = spec.uv_cutoff;
    if (cutoff > 0.0 && cutoff <= crossover) {
        IntegralResult r = integrate_adaptive(integrand, 0.0, cutoff, spec, markers);
        r.uv_cutoff = cutoff;
        return r;
    }

    IntegralResult total = integrate_adaptive(integrand, 0.0, crossover, spec, markers);
    QuadratureSpec tail_spec = spec;
    tail_spec.abs_tol = std::max(spec.abs_tol, 0.1 * spec.rel_tol * std::abs(total.value));
    const double half_period = kPi / (2.0 * q);
    if (cutoff > 0.0) {
        std::vector<double> tail_markers;
        const double span = cutoff - crossover;
        const auto count = static_cast<std::size_t>(std::min(span / half_period, 0.25 * static_cast<double>(spec.max_segments)));
        for (std::size_t k = 1; k < count; ++k) tail_markers.push_back(crossover + static_cast<double>(k) * half_period);
        IntegralResult tail = integrate_adaptive(integrand, crossover, cutoff, tail_spec, tail_markers);
        tail.uv_cutoff = cutoff;
        total += tail;
    } else {
        total += integrate_oscillatory_tail(integrand, crossover, half_period, tail_spec);
    }
    return total;
}

double relative_difference(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

IntegralResult derived(double value, double error, Diagnostics diags = {}) {
    IntegralResult r;
    r.value = value;
    r.error_estimate = error;
    r.diagnostics = std::move(diags);
    return r;
}

}  // namespace

void ThermalState::validate() const {
    if (!(temperature >= 0.0) || !std::isfinite(temperature))
        throw DomainError("thermal.temperature must be finite and >= 0");
}

double planck_occupation(double omega, const ThermalState& thermal) {
    thermal.validate();
    if (thermal.is_vacuum()) return 0.0;
    if (!(omega > 0.0)) throw DivergenceError("planck_occupation diverges at omega = 0 for T > 0");
    return 1.0 / std::expm1(omega / thermal.temperature);
}

double thermal_weight(double omega, const ThermalState& thermal) {
    if (thermal.is_vacuum()) return 1.0;
    return 1.0 + 2.0 * planck_occupation(omega, thermal);
}

IntegralResult casimir_force(const Cavity& cavity, const ThermalState& thermal, const QuadratureSpec& spec) {
    if (cavity.is_transparent()) return {};
    return spectral_integral(cavity, thermal, spec, [&](double w) {
        return weighted_frequency(w, thermal) * evaluate(cavity, w).one_minus_g / kTwoPi;
    });
}

IntegralResult casimir_energy_phase(const Cavity& cavity, const ThermalState& thermal,
                                    const QuadratureSpec& spec) {
    if (cavity.is_transparent()) return {};
    IntegralResult r = spectral_integral(cavity, thermal, spec, [&](double w) {
        return -energy_weight_derivative(w, thermal) * evaluate(cavity, w).delta / kTwoPi;
    });
    // Integration by parts leaves -W(0) delta(0+) / 2pi, with W(0) = 2T. delta(0+) is
    // extrapolated from just above the zero-frequency clamp.
    if (!thermal.is_vacuum()) {
        const double eps = 1e-6 * cavity.smallest_scale();
        const CavityEvaluation ev = evaluate(cavity, eps);
        r.value -= weighted_frequency(0.0, thermal) * (ev.delta - eps * ev.tau) / kTwoPi;
    }
    return r;
}

IntegralResult casimir_energy_delay(const Cavity& cavity, const ThermalState& thermal,
                                    const QuadratureSpec& spec) {
    if (cavity.is_transparent()) return {};
    return spectral_integral(cavity, thermal, spec, [&](double w) {
        return weighted_frequency(w, thermal) * evaluate(cavity, w).tau / kTwoPi;
    });
}

IntegralResult casimir_energy_wick(const Cavity& cavity, const QuadratureSpec& spec) {
    spec.validate();
    if (cavity.is_transparent()) return {};
    const auto& m1 = cavity.mirror1();
    const auto& m2 = cavity.mirror2();
    if (!m1.reflection_imaginary(0.0) || !m2.reflection_imaginary(0.0))
        throw UnsupportedModelError(
            "imaginary-axis energy needs mirrors with an analytic continuation "
            "(point scatterers or constant_lossy without roll-off)");
    return wick_axis_value(
        [&](double xi) { return *m1.reflection_imaginary(xi) * *m2.reflection_imaginary(xi); },
        cavity.length(), spec);
}

double force_route_reference_length(const Cavity& cavity) {
    double smallest = kInf;
    for (double s : {cavity.mirror1().scale(), cavity.mirror2().scale()})
        if (s > 0.0 && std::isfinite(s)) smallest = std::min(smallest, s);
    const double from_mirrors = std::isfinite(smallest) ? 50.0 / smallest : 0.0;
    return std::max(from_mirrors, 4.0 * cavity.length());
}

IntegralResult casimir_energy_force_route(const Cavity& cavity, const ThermalState& thermal,
                                          const QuadratureSpec& spec) {
    if (cavity.is_transparent()) return {};
    const double q = cavity.length();
    const double q_ref = force_route_reference_length(cavity);

    IntegralResult boundary = casimir_energy_phase(cavity.with_length(q_ref), thermal, spec);

    // F ~ 1/q^2 at large q, so in u = 1/q the integrand F(1/u)/u^2 is nearly flat.
    double worst_relative = 0.0;
    Diagnostics inner_diags;
    auto integrand = [&](double u) {
        const double length = 1.0 / u;
        IntegralResult f = casimir_force(cavity.with_length(length), thermal, spec);
        if (f.value != 0.0) worst_relative = std::max(worst_relative, f.error_estimate / std::abs(f.value));
        for (const auto& d : f.diagnostics)
            if (d.severity != Severity::Info) inner_diags.push_back(d);
        return f.value / (u * u);
    };
    QuadratureSpec outer = spec;
    outer.rel_tol = std::max(spec.rel_tol * 10.0, 1e-9);
    outer.uv_cutoff = 0.0;
    IntegralResult work = integrate_adaptive(integrand, 1.0 / q_ref, 1.0 / q, outer);

    IntegralResult out;
    out.value = boundary.value - work.value;
    out.error_estimate = boundary.error_estimate + work.error_estimate + worst_relative * std::abs(work.value);
    out.segments_used = boundary.segments_used + work.segments_used;
    out.diagnostics = boundary.diagnostics;
    append(out.diagnostics, work.diagnostics);
    // One copy of each distinct inner diagnostic code is enough.
    std::vector<std::string> seen;
    for (const auto& d : inner_diags) {
        if (std::find(seen.begin(), seen.end(), d.code) != seen.end()) continue;
        seen.push_back(d.code);
        out.diagnostics.push_back(d);
    }
    if (!thermal.is_vacuum())
        out.diagnostics.push_back({Severity::Warn, "thermal_force_route",
                                   "at T > 0 the integrated force is a free-energy difference; "
                                   "it is not expected to equal the thermal energy"});
    return out;
}

EnergyBreakdown energy_breakdown(const Cavity& cavity, const ThermalState& thermal, const QuadratureSpec& spec,
                                 double tolerance) {
    EnergyBreakdown b;
    b.phase_repr = casimir_energy_phase(cavity, thermal, spec);
    b.delay_repr = casimir_energy_delay(cavity, thermal, spec);
    b.force_route = casimir_energy_force_route(cavity, thermal, spec);
    b.reference_length = force_route_reference_length(cavity);
    if (thermal.is_vacuum()) {
        try {
            b.wick = casimir_energy_wick(cavity, spec);
        } catch (const UnsupportedModelError&) {
            b.diagnostics.push_back({Severity::Info, "wick_unavailable",
                                     "mirror models have no analytic continuation; imaginary-axis route skipped"});
        }
    } else {
        b.diagnostics.push_back({Severity::Info, "wick_unavailable", "imaginary-axis route covers vacuum only"});
    }
    b.residuals.phase_delay = relative_difference(b.phase_repr.value, b.delay_repr.value);
    b.residuals.phase_force = relative_difference(b.phase_repr.value, b.force_route.value);
    b.residuals.delay_force = relative_difference(b.delay_repr.value, b.force_route.value);
    if (b.wick) b.residuals.phase_wick = relative_difference(b.phase_repr.value, b.wick->value);

    auto check = [&](const char* name, double r) {
        if (r > tolerance)
            b.diagnostics.push_back({Severity::Warn, "route_mismatch",
                                     std::string(name) + " residual " + std::to_string(r) + " exceeds " +
                                         std::to_string(tolerance)});
    };
    check("phase/delay", b.residuals.phase_delay);
    // At T > 0 the force route is a free energy; its mismatch is already flagged.
    if (thermal.is_vacuum()) {
        check("phase/force", b.residuals.phase_force);
        check("delay/force", b.residuals.delay_force);
    }
    if (b.residuals.phase_wick) check("phase/wick", *b.residuals.phase_wick);
    return b;
}

IntegralResult stiffness(const Cavity& cavity, const ThermalState& thermal, const QuadratureSpec& spec, double h) {
    const double q = cavity.length();
    if (!(h > 0.0) || !(h < 0.5 * q)) throw DomainError("stiffness needs 0 < h < q/2");
    if (cavity.is_transparent()) return {};

    double noise = 0.0;
    Diagnostics diags;
    auto force_at = [&](double length) {
        IntegralResult f = casimir_force(cavity.with_length(length), thermal, spec);
        noise = std::max(noise, f.error_estimate);
        for (const auto& d : f.diagnostics)
            if (d.severity != Severity::Info) diags.push_back(d);
        return f.value;
    };
    auto central = [&](double step) { return -(force_at(q + step) - force_at(q - step)) / (2.0 * step); };

    const double d1 = central(h);
    const double d2 = central(0.5 * h);
    const double d4 = central(0.25 * h);
    const double r1 = (4.0 * d2 - d1) / 3.0;
    const double r2 = (4.0 * d4 - d2) / 3.0;
    const double kappa = (16.0 * r2 - r1) / 15.0;
    const double error = std::abs(kappa - r2) + 4.0 * noise / h;
    if (error > 1e-6 * std::abs(kappa) && error > 0.0)
        diags.push_back({Severity::Warn, "stiffness_not_converged",
                         "Richardson estimate of -dF/dq has relative error " +
                             std::to_string(error / std::max(std::abs(kappa), 1e-300))});
    return derived(kappa, error, std::move(diags));
}

QuasistaticSummary mass_correction(const Cavity& cavity, const QuadratureSpec& spec) {
    const ThermalState vacuum{};
    const double q = cavity.length();
    QuasistaticSummary s;
    s.force = casimir_force(cavity, vacuum, spec);
    s.energy = casimir_energy_phase(cavity, vacuum, spec);
    s.kappa = cavity.is_transparent() ? IntegralResult{} : stiffness(cavity, vacuum, spec, 0.05 * q);
    const double f = s.force.value;
    const double e = s.energy.value;
    const double ef = s.force.error_estimate;
    const double ee = s.energy.error_estimate;
    s.mu = derived(-2.0 * f * q + 0.0, 2.0 * q * ef);
    s.einstein_mass = derived(e - f * q, ee + q * ef);
    s.stored_gap = derived(e + f * q, ee + q * ef);
    return s;
}

PerfectMirrorEnergy perfect_mirror_oracle(double q, std::size_t n_terms) {
    if (!(q > 0.0)) throw DomainError("perfect_mirror_oracle needs q > 0");
    PerfectMirrorEnergy out{-kPi / (24.0 * q), 0.0};
    if (n_terms == 0) return out;

    // Abel damping e^{-a n}: sum n e^{-a n} = 1/a^2 - 1/12 + O(a^2). The damping
    // is chosen so the last retained mode is suppressed by e^{-50}.
    const double a = 50.0 / static_cast<double>(n_terms);
    double sum = 0.0, c = 0.0;
    for (std::size_t n = 1; n <= n_terms; ++n) {
        const double term = static_cast<double>(n) * std::exp(-a * static_cast<double>(n));
        const double t = sum + term;
        c += std::abs(sum) >= term ? (sum - t) + term : (term - t) + sum;
        sum = t;
    }
    const double finite = (sum + c) - 1.0 / (a * a);
    out.abel_estimate = kPi / (2.0 * q) * finite;
    return out;
}

}  // namespace vacmech
