#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include "vacmech/diagnostics.hpp"

namespace vacmech {

enum class Segmentation {
    ResonanceAware,  ///< breakpoints where the round-trip phase crosses k pi
    UniformInPhase,  ///< breakpoints where 2 w q crosses k pi
};

[[nodiscard]] const char* to_string(Segmentation s);
[[nodiscard]] std::optional<Segmentation> parse_segmentation(const std::string& s);

struct QuadratureSpec {
    double rel_tol = 1e-10;
    double abs_tol = 0.0;
    std::size_t max_segments = 2'000'000;
    /// UV cutoff Lambda; 0 means none (oscillatory tails are summed to infinity).
    double uv_cutoff = 0.0;
    Segmentation segmentation = Segmentation::ResonanceAware;

    /// Throws DomainError naming the offending field.
    void validate() const;
};

struct IntegralResult {
    double value = 0.0;
    double error_estimate = 0.0;
    std::size_t segments_used = 0;
    Diagnostics diagnostics;
    /// Set when the integral was truncated at a UV cutoff.
    std::optional<double> uv_cutoff;

    IntegralResult& operator+=(const IntegralResult& other);
};

using RealFunction = std::function<double(double)>;

/**
 * Globally adaptive 21-point Gauss-Kronrod quadrature on [a, b].
 *
 * The interval is first split at `markers` (resonance locations supplied by
 * the caller); the segment with the largest error is then bisected until the
 * summed error estimate meets max(abs_tol, rel_tol |value|). Segments whose
 * error is at the round-off floor are retired. Partial results are reduced in
 * order of their left endpoint, so results are bit-reproducible.
 *
 * Exhausting max_segments is reported as a Warn diagnostic, never silently.
 */
[[nodiscard]] IntegralResult integrate_adaptive(const RealFunction& f, double a, double b,
                                                const QuadratureSpec& spec,
                                                std::span<const double> markers = {});

/**
 * Integral of an asymptotically oscillating f over [a, infinity).
 *
 * Starting at the first sign change of f past `a`, f is integrated over
 * consecutive windows of length `half_period`; the resulting alternating
 * series is summed with iterated averaging of its partial sums. If the window
 * integrals stop alternating, a Warn diagnostic is raised and the integral
 * falls back to plain truncation at spec.uv_cutoff (or to plain summation when
 * no cutoff is set).
 */
[[nodiscard]] IntegralResult integrate_oscillatory_tail(const RealFunction& f, double a,
                                                        double half_period,
                                                        const QuadratureSpec& spec);

/// Loop amplitude r1(i xi) r2(i xi) on the positive imaginary frequency axis.
using ImaginaryLoopEvaluator = std::function<std::complex<double>(double xi)>;

/// (1/2 pi) int_0^inf Re ln(1 - r(i xi) e^{-2 xi q}) d xi: the vacuum phase-shift
/// energy after rotating the frequency contour onto the imaginary axis.
[[nodiscard]] IntegralResult wick_axis_value(const ImaginaryLoopEvaluator& loop_at_imaginary,
                                             double q, const QuadratureSpec& spec);

}  // namespace vacmech
