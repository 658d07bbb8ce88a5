#pragma once

#include <string>
#include <vector>

#include "vacmech/mirrors.hpp"
#include "vacmech/quadrature.hpp"

namespace vacmech {

/// Pointlike scatterer with bare mass m_b, coupling frequency Omega and a
/// sharp UV cutoff Lambda applied to every spectral factor.
struct PointScattererSpec {
    double m_b = 0.0;
    double omega_c = 1.0;
    double uv_cutoff = kInf;

    /// Throws DomainError for m_b < 0, Omega <= 0 or Lambda <= 0. An infinite
    /// Lambda is accepted here; operations that need it finite throw.
    void validate() const;
};

/// Name of the cutoff scheme recorded in output metadata.
inline constexpr const char* kCutoffScheme = "sharp";

struct MeanMassCorrection {
    double value = 0.0;  ///< closed form (Omega / 4pi) ln(1 + Lambda^2 / Omega^2)
    double quadrature = 0.0;  ///< (1/2pi) int_0^Lambda w tau(w) dw
    double error_estimate = 0.0;
    double residual = 0.0;  ///< |value - quadrature| / |value|
};

/// Stored-field contribution to the mass. Throws DivergenceError when the
/// cutoff is infinite.
[[nodiscard]] MeanMassCorrection mean_mass_correction(const PointScattererSpec& spec);

/// w tau(w) = w Omega / (Omega^2 + w^2), zero beyond the cutoff.
[[nodiscard]] double weighted_delay(const PointScattererSpec& spec, double omega);

/// C_mm[w] = (1/pi) int_0^w f(a) f(w - a) da with f = weighted_delay. Zero for
/// w <= 0. A finite cutoff limits the support to w < 2 Lambda.
[[nodiscard]] double mass_noise_spectrum(const PointScattererSpec& spec, double omega,
                                         double* error_estimate = nullptr);

/// w^3 / (6 pi Omega^2). Throws DomainError for w <= 0.
[[nodiscard]] double low_freq_asymptote(const PointScattererSpec& spec, double omega);

struct VarianceT0 {
    double value = 0.0;  ///< (1/2pi) int C_mm dw
    double error_estimate = 0.0;
    double identity = 0.0;  ///< 2 <dm>^2
    double residual = 0.0;
};

/// Equal-time mass variance. Throws DivergenceError for an infinite cutoff.
[[nodiscard]] VarianceT0 mass_variance_t0(const PointScattererSpec& spec);

enum class RecoilStatus { Ok, Warn };

struct RecoilValidity {
    RecoilStatus status = RecoilStatus::Ok;
    double ratio = 0.0;  ///< omega_max / (m_b + <dm>)
    std::string message;
};

/// Ratios at or above this value are flagged.
inline constexpr double kRecoilWarnRatio = 0.1;

[[nodiscard]] RecoilValidity recoil_validity(const PointScattererSpec& spec, double omega_max);

struct SpectrumPoint {
    double omega = 0.0;
    double c_mm = 0.0;
    double asymptote = 0.0;
    double ratio = 0.0;  ///< c_mm / asymptote
    double error_estimate = 0.0;
};

struct MassStatistics {
    MeanMassCorrection mean_correction;
    std::vector<SpectrumPoint> spectrum;
    VarianceT0 variance_t0;
    RecoilValidity validity;
    Diagnostics diagnostics;
};

/// Log-spaced grid of `points` frequencies over [lo, hi].
[[nodiscard]] std::vector<double> log_grid(double lo, double hi, std::size_t points);

/// Default spectrum grid: 200 log-spaced points over [1e-3 Omega, 10 Omega].
[[nodiscard]] std::vector<double> default_spectrum_grid(const PointScattererSpec& spec);

/// Full statistics; spectrum samples are evaluated concurrently.
[[nodiscard]] MassStatistics mass_statistics(const PointScattererSpec& spec, const std::vector<double>& grid);

}  // namespace vacmech
