#pragma once

#include <complex>
#include <limits>
#include <optional>
#include <variant>
#include <vector>

#include "vacmech/diagnostics.hpp"

namespace vacmech {

/// Dimensionless complex scattering amplitude. Units throughout: hbar = c = 1.
using ComplexAmplitude = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Pointlike scatterer: r = -Omega / (Omega - i w).
struct PointScatterer {
    double omega_c;
};

/// Constant amplitude rho e^{i phi}, rolled off as 1/(1 + (w/cutoff)^2).
/// An infinite cutoff means no roll-off; such a mirror is never transparent.
struct ConstantLossy {
    double rho;
    double phi;
    double cutoff;
};

struct TabulatedSample {
    double omega;
    ComplexAmplitude r;
};

/// Linear interpolation in (Re r, Im r); beyond the last sample the amplitude
/// decays as (w_last / w)^2.
struct Tabulated {
    std::vector<TabulatedSample> samples;
};

/**
 * Frequency-dependent reflection amplitude of a single mirror.
 *
 * Immutable after construction. All evaluators are pure in (model, omega)
 * and accept omega >= 0 only; callers validate the sign.
 */
class MirrorModel {
public:
    using Variant = std::variant<PointScatterer, ConstantLossy, Tabulated>;

    [[nodiscard]] static MirrorModel point(double omega_c);
    [[nodiscard]] static MirrorModel constant_lossy(double rho, double phi, double cutoff = kInf);
    [[nodiscard]] static MirrorModel tabulated(std::vector<TabulatedSample> samples);
    [[nodiscard]] static MirrorModel transparent() { return constant_lossy(0.0, 0.0); }

    [[nodiscard]] const Variant& variant() const noexcept { return model_; }

    template <class T>
    [[nodiscard]] const T* as() const noexcept { return std::get_if<T>(&model_); }

    /// r[w]
    [[nodiscard]] ComplexAmplitude reflection(double omega) const;
    /// s[w] = 1 + r[w], evaluated without cancellation where r -> -1.
    [[nodiscard]] ComplexAmplitude one_plus_reflection(double omega) const;
    /// 1 - |r[w]|^2, evaluated without cancellation where |r| -> 1.
    [[nodiscard]] double one_minus_modulus_sq(double omega) const;
    /// dr/dw. Closed form except for tabulated models (central differences).
    [[nodiscard]] ComplexAmplitude reflection_derivative(double omega) const;
    /// arg r[w], continuous in w. At w = 0 it equals the principal value.
    [[nodiscard]] double phase(double omega) const;

    /// Characteristic frequency of the model (Omega, cutoff, last sample);
    /// 0 for a transparent mirror, +inf for an unrolled constant.
    [[nodiscard]] double scale() const noexcept;
    [[nodiscard]] bool is_transparent() const noexcept;
    /// |r| -> 0 as w -> infinity.
    [[nodiscard]] bool is_high_frequency_transparent() const noexcept;

    /// r(i xi) for models with a known continuation to the upper half plane.
    [[nodiscard]] std::optional<ComplexAmplitude> reflection_imaginary(double xi) const;

private:
    explicit MirrorModel(Variant v) : model_(std::move(v)) {}

    Variant model_;
    // Tabulated only: phase unwrapped along the samples.
    std::vector<double> unwrapped_phase_;
};

/// r[w] with argument checking; negative frequency is a DomainError.
[[nodiscard]] ComplexAmplitude reflect(const MirrorModel& model, double omega);

struct AmplitudePhase {
    double rho;
    double phi;
};

/// Modulus and the branch of arg r closest to `previous_phase`.
/// r = 0 keeps `previous_phase`.
[[nodiscard]] AmplitudePhase amplitude_phase(ComplexAmplitude r, double previous_phase = 0.0);

/// Per-sweep phase accumulator. Feed amplitudes in sweep order.
class PhaseUnwrapper {
public:
    AmplitudePhase operator()(ComplexAmplitude r) {
        AmplitudePhase ap = amplitude_phase(r, previous_);
        previous_ = ap.phi;
        return ap;
    }
    [[nodiscard]] double previous() const noexcept { return previous_; }

private:
    double previous_ = 0.0;
};

struct ScatteringPair {
    ComplexAmplitude s;  ///< diagonal element, 1 + r
    ComplexAmplitude r;  ///< off-diagonal element
    ComplexAmplitude det;  ///< s^2 - r^2
    double unitarity_residual;  ///< |s|^2 + |r|^2 - 1
    double cross_term;  ///< Re(s conj(r))
};

[[nodiscard]] ScatteringPair scattering_pair(const MirrorModel& model, double omega);

/// Reflection delay d(arg r)/dw; Omega/(Omega^2 + w^2) for a point scatterer.
[[nodiscard]] double mirror_delay(const MirrorModel& model, double omega);

}  // namespace vacmech
