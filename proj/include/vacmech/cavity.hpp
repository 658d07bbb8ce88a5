#pragma once

#include <cstddef>
#include <vector>

#include "vacmech/diagnostics.hpp"
#include "vacmech/mirrors.hpp"

namespace vacmech {

/// Two mirrors a distance q apart (c = 1, so q is also the one-way transit time).
class Cavity {
public:
    Cavity(MirrorModel mirror1, MirrorModel mirror2, double q);

    [[nodiscard]] const MirrorModel& mirror1() const noexcept { return m1_; }
    [[nodiscard]] const MirrorModel& mirror2() const noexcept { return m2_; }
    [[nodiscard]] double length() const noexcept { return q_; }
    [[nodiscard]] Cavity with_length(double q) const { return Cavity(m1_, m2_, q); }

    /// Loop amplitude r1 r2.
    [[nodiscard]] ComplexAmplitude loop(double omega) const;
    [[nodiscard]] ComplexAmplitude loop_derivative(double omega) const;
    /// 1 - r1 r2 without cancellation for point scatterers near w = 0.
    [[nodiscard]] ComplexAmplitude one_minus_loop(double omega) const;
    /// 1 - |r1 r2|^2.
    [[nodiscard]] double one_minus_loop_modulus_sq(double omega) const;
    /// Continuous arg(r1 r2), shifted so its value at w = 0 lies in (-pi, pi].
    [[nodiscard]] double loop_phase(double omega) const;
    /// 2 w q + arg(r1 r2): resonances sit at multiples of 2 pi.
    [[nodiscard]] double round_trip_phase(double omega) const;

    [[nodiscard]] bool is_transparent() const noexcept;
    /// Both mirrors transparent at high frequency, so real-axis integrals converge.
    [[nodiscard]] bool is_high_frequency_transparent() const noexcept;
    /// Smallest finite scale among the mirror scales and 1/q.
    [[nodiscard]] double smallest_scale() const noexcept;
    /// Frequency above which spectral integrands are treated as an oscillatory tail:
    /// 20 max(mirror scales, pi/q).
    [[nodiscard]] double crossover() const noexcept;
    /// r1 r2 -> 1 at w = 0, making g a 0/0 limit there.
    [[nodiscard]] bool singular_at_dc() const noexcept { return singular_at_dc_; }

private:
    MirrorModel m1_;
    MirrorModel m2_;
    double q_;
    double phase_offset_ = 0.0;
    bool singular_at_dc_ = false;
};

struct SpectralSample {
    double omega;
    double g;
    double delta;
    double tau;
};

/// Everything the spectral functions share at one frequency.
struct CavityEvaluation {
    double omega = 0.0;
    ComplexAmplitude z;  ///< r e^{2iwq}
    ComplexAmplitude one_minus_z;
    double one_minus_rho_sq = 0.0;
    double rho = 0.0;
    double phi = 0.0;
    double drho = 0.0;
    double dphi = 0.0;
    double g = 1.0;
    double one_minus_g = 0.0;
    double delta = 0.0;
    double tau = 0.0;
    bool pole = false;
};

/// Evaluates g, delta and tau together. Never throws on a pole; sets `pole`.
[[nodiscard]] CavityEvaluation evaluate(const Cavity& cavity, double omega);

/// Airy function g[w] = (1 - |r|^2) / |1 - r e^{2iwq}|^2. Throws PoleError on a pole.
[[nodiscard]] double airy(const Cavity& cavity, double omega);

/// delta[w] = -arg(1 - r e^{2iwq}). Throws PoleError on a pole.
[[nodiscard]] double phase_shift(const Cavity& cavity, double omega);

/**
 * Time delay from the decomposition
 *   tau = -(1 - g)(q + phi'/2) + g sin(2wq + phi) rho' / (1 - rho^2),
 * with rho, phi the modulus and phase of the loop amplitude.
 */
[[nodiscard]] double time_delay_analytic(const Cavity& cavity, double omega);

struct DerivativeEstimate {
    double value;
    double error;
};

/// d delta / dw by central differences with Richardson refinement (Ridders'
/// tableau), starting from step h. Throws ConvergenceError when the tableau
/// error stays above rel_tol * max(1, |tau|).
[[nodiscard]] DerivativeEstimate time_delay_numeric(const Cavity& cavity, double omega, double h,
                                                    double rel_tol = 1e-9);

/// A starting step for time_delay_numeric that resolves the local structure of delta.
[[nodiscard]] double suggested_delay_step(const Cavity& cavity, double omega);

[[nodiscard]] SpectralSample spectral_sample(const Cavity& cavity, double omega);

struct ResonanceSearch {
    std::vector<double> omegas;
    Diagnostics diagnostics;
};

/// First n_max local maxima of g below the crossover frequency.
[[nodiscard]] ResonanceSearch resonances(const Cavity& cavity, std::size_t n_max);

/// Frequencies in (0, omega_max) where the round-trip phase crosses a multiple
/// of pi (resonances and antiresonances). With include_mirror_phase = false
/// the markers are the free-propagation ones, 2 w q = k pi.
[[nodiscard]] std::vector<double> phase_markers(const Cavity& cavity, double omega_max,
                                                bool include_mirror_phase);

}  // namespace vacmech
