#pragma once

#include <cstddef>
#include <optional>

#include "vacmech/cavity.hpp"
#include "vacmech/quadrature.hpp"

namespace vacmech {

/// Field temperature in energy units (k_B = 1). T = 0 is the vacuum.
struct ThermalState {
    double temperature = 0.0;

    void validate() const;
    [[nodiscard]] bool is_vacuum() const noexcept { return temperature == 0.0; }
};

/// Planck occupation 1/(e^{w/T} - 1); 0 in vacuum. w = 0 with T > 0 diverges
/// and throws DivergenceError.
[[nodiscard]] double planck_occupation(double omega, const ThermalState& thermal);

/// Spectral weight 2(1/2 + n) = coth(w / 2T) multiplying each mode (1 in vacuum).
[[nodiscard]] double thermal_weight(double omega, const ThermalState& thermal);

/// (1/2pi) int w * weight(w) * (1 - g[w]) dw.
[[nodiscard]] IntegralResult casimir_force(const Cavity& cavity, const ThermalState& thermal,
                                           const QuadratureSpec& spec);

/// (1/2pi) int d/dw[w weight(w)] * (-delta[w]) dw; in vacuum the bracket is 1.
[[nodiscard]] IntegralResult casimir_energy_phase(const Cavity& cavity, const ThermalState& thermal,
                                                  const QuadratureSpec& spec);

/// (1/2pi) int w * weight(w) * tau[w] dw.
[[nodiscard]] IntegralResult casimir_energy_delay(const Cavity& cavity, const ThermalState& thermal,
                                                  const QuadratureSpec& spec);

/// Vacuum energy on the imaginary frequency axis. Needs mirrors whose
/// reflection continues analytically (point scatterers, unrolled constants);
/// otherwise throws UnsupportedModelError.
[[nodiscard]] IntegralResult casimir_energy_wick(const Cavity& cavity, const QuadratureSpec& spec);

/// Reference length for the force route: max(50 / smallest mirror scale, 4 q).
[[nodiscard]] double force_route_reference_length(const Cavity& cavity);

/// E(q) = E_phase(q_ref) - int_q^{q_ref} F(q') dq'.
[[nodiscard]] IntegralResult casimir_energy_force_route(const Cavity& cavity, const ThermalState& thermal,
                                                        const QuadratureSpec& spec);

/// Pairwise relative differences |a - b| / max(|a|, |b|).
struct RouteResiduals {
    double phase_delay = 0.0;
    double phase_force = 0.0;
    double delay_force = 0.0;
    std::optional<double> phase_wick;
};

struct EnergyBreakdown {
    IntegralResult phase_repr;
    IntegralResult delay_repr;
    IntegralResult force_route;
    std::optional<IntegralResult> wick;
    double reference_length = 0.0;
    RouteResiduals residuals;
    Diagnostics diagnostics;
};

/// All energy routes at once; a residual above `tolerance` raises a Warn.
[[nodiscard]] EnergyBreakdown energy_breakdown(const Cavity& cavity, const ThermalState& thermal,
                                               const QuadratureSpec& spec, double tolerance = 1e-4);

/// kappa = -dF/dq from central differences at steps h, h/2, h/4 with two
/// Richardson levels. Needs 0 < h < q/2.
[[nodiscard]] IntegralResult stiffness(const Cavity& cavity, const ThermalState& thermal,
                                       const QuadratureSpec& spec, double h);

struct QuasistaticSummary {
    IntegralResult force;
    IntegralResult energy;
    IntegralResult kappa;
    IntegralResult mu;  ///< -2 F q
    IntegralResult einstein_mass;  ///< E - F q
    IntegralResult stored_gap;  ///< einstein_mass - mu = E + F q
};

/// Vacuum quasistatic summary of the cavity as a whole.
[[nodiscard]] QuasistaticSummary mass_correction(const Cavity& cavity, const QuadratureSpec& spec);

struct PerfectMirrorEnergy {
    double value;  ///< -pi / (24 q)
    double abel_estimate;  ///< finite part of the exponentially damped mode sum
};

/// Zeta-regularized energy of the perfect-mirror mode sum sum_n n pi / (2 q),
/// with an Abel-summed cross-check over n_terms modes.
[[nodiscard]] PerfectMirrorEnergy perfect_mirror_oracle(double q, std::size_t n_terms);

}  // namespace vacmech
