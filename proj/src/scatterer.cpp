#include "vacmech/scatterer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <thread>

namespace vacmech {
namespace {

QuadratureSpec tight_spec(double rel_tol) {
    QuadratureSpec s;
    s.rel_tol = rel_tol;
    s.max_segments = 100'000;
    return s;
}

void require_cutoff(const PointScattererSpec& spec, const char* what) {
    spec.validate();
    if (!std::isfinite(spec.uv_cutoff))
        throw DivergenceError(std::string(what) +
                              " is infinite without a UV cutoff: high-frequency field fluctuations diverge");
}

}  // namespace

void PointScattererSpec::validate() const {
    if (!(m_b >= 0.0) || !std::isfinite(m_b)) throw DomainError("scatterer.m_b must be finite and >= 0");
    if (!(omega_c > 0.0) || !std::isfinite(omega_c)) throw DomainError("scatterer.omega_c must be finite and > 0");
    if (!(uv_cutoff > 0.0)) throw DomainError("scatterer.uv_cutoff must be > 0");
}

double weighted_delay(const PointScattererSpec& spec, double omega) {
    if (omega < 0.0 || omega > spec.uv_cutoff) return 0.0;
    const double w = spec.omega_c;
    return omega * w / (w * w + omega * omega);
}

MeanMassCorrection mean_mass_correction(const PointScattererSpec& spec) {
    require_cutoff(spec, "the mean mass correction");
    const double w = spec.omega_c;
    const double lambda = spec.uv_cutoff;
    MeanMassCorrection out;
    const double x = lambda / w;
    out.value = w / (4.0 * kPi) * std::log1p(x * x);

    const double markers[] = {std::min(w, lambda)};
    const IntegralResult r = integrate_adaptive(
        [&](double omega) { return weighted_delay(spec, omega) / (2.0 * kPi); }, 0.0, lambda,
        tight_spec(1e-13), markers);
    out.quadrature = r.value;
    out.error_estimate = r.error_estimate;
    out.residual = out.value == 0.0 ? 0.0 : std::abs(out.value - out.quadrature) / std::abs(out.value);
    return out;
}

double mass_noise_spectrum(const PointScattererSpec& spec, double omega, double* error_estimate) {
    spec.validate();
    if (error_estimate) *error_estimate = 0.0;
    if (!(omega > 0.0)) return 0.0;
    const double lo = std::max(0.0, omega - spec.uv_cutoff);
    const double mid = 0.5 * omega;
    if (!(lo < mid)) return 0.0;
    // The integrand is symmetric about w/2: integrate one half and double.
    const IntegralResult r = integrate_adaptive(
        [&](double a) { return weighted_delay(spec, a) * weighted_delay(spec, omega - a); }, lo, mid,
        tight_spec(1e-12));
    if (error_estimate) *error_estimate = 2.0 / kPi * r.error_estimate;
    return std::max(0.0, 2.0 / kPi * r.value);
}

double low_freq_asymptote(const PointScattererSpec& spec, double omega) {
    if (!(omega > 0.0)) throw DomainError("low_freq_asymptote needs omega > 0");
    const double w = spec.omega_c;
    return omega * omega * omega / (6.0 * kPi * w * w);
}

VarianceT0 mass_variance_t0(const PointScattererSpec& spec) {
    require_cutoff(spec, "the mass variance");
    const MeanMassCorrection mean = mean_mass_correction(spec);
    const double lambda = spec.uv_cutoff;
    std::vector<double> markers = {lambda};
    if (spec.omega_c < lambda) markers.insert(markers.begin(), spec.omega_c);
    if (2.0 * spec.omega_c < 2.0 * lambda && 2.0 * spec.omega_c != lambda) markers.push_back(2.0 * spec.omega_c);
    std::sort(markers.begin(), markers.end());

    double inner_error = 0.0;
    const IntegralResult r = integrate_adaptive(
        [&](double omega) {
            double e = 0.0;
            const double c = mass_noise_spectrum(spec, omega, &e);
            inner_error = std::max(inner_error, e);
            return c / (2.0 * kPi);
        },
        0.0, 2.0 * lambda, tight_spec(1e-10), markers);

    VarianceT0 out;
    out.value = r.value;
    out.error_estimate = r.error_estimate + inner_error * 2.0 * lambda / (2.0 * kPi);
    out.identity = 2.0 * mean.value * mean.value;
    out.residual = out.identity == 0.0 ? 0.0 : std::abs(out.value - out.identity) / out.identity;
    return out;
}

RecoilValidity recoil_validity(const PointScattererSpec& spec, double omega_max) {
    const double mass = spec.m_b + mean_mass_correction(spec).value;
    RecoilValidity out;
    out.ratio = mass > 0.0 ? omega_max / mass : kInf;
    if (out.ratio >= kRecoilWarnRatio) {
        out.status = RecoilStatus::Warn;
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "omega_max / (m_b + <dm>) = %.4g: recoil of the scatterer cannot be neglected", out.ratio);
        out.message = buf;
    }
    return out;
}

std::vector<double> log_grid(double lo, double hi, std::size_t points) {
    if (!(lo > 0.0) || !(hi > lo) || points < 2) throw DomainError("log_grid needs 0 < lo < hi and >= 2 points");
    std::vector<double> g(points);
    const double step = std::log(hi / lo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) g[i] = lo * std::exp(step * static_cast<double>(i));
    g.back() = hi;
    return g;
}

std::vector<double> default_spectrum_grid(const PointScattererSpec& spec) {
    return log_grid(1e-3 * spec.omega_c, 10.0 * spec.omega_c, 200);
}

MassStatistics mass_statistics(const PointScattererSpec& spec, const std::vector<double>& grid) {
    require_cutoff(spec, "mass statistics");
    MassStatistics out;
    out.mean_correction = mean_mass_correction(spec);
    out.variance_t0 = mass_variance_t0(spec);

    out.spectrum.resize(grid.size());
    auto fill = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            SpectrumPoint& p = out.spectrum[i];
            p.omega = grid[i];
            p.c_mm = mass_noise_spectrum(spec, p.omega, &p.error_estimate);
            p.asymptote = p.omega > 0.0 ? low_freq_asymptote(spec, p.omega) : 0.0;
            p.ratio = p.asymptote > 0.0 ? p.c_mm / p.asymptote : 0.0;
        }
    };
    const std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 16);
    const std::size_t chunk = (grid.size() + workers - 1) / std::max<std::size_t>(workers, 1);
    std::vector<std::future<void>> jobs;
    for (std::size_t begin = 0; begin < grid.size(); begin += chunk)
        jobs.push_back(std::async(std::launch::async, fill, begin, std::min(grid.size(), begin + chunk)));
    for (auto& j : jobs) j.get();

    const double omega_max = grid.empty() ? 0.0 : *std::max_element(grid.begin(), grid.end());
    out.validity = recoil_validity(spec, omega_max);
    if (out.validity.status == RecoilStatus::Warn)
        out.diagnostics.push_back({Severity::Warn, "recoil_regime", out.validity.message});
    if (out.mean_correction.residual > 1e-8)
        out.diagnostics.push_back({Severity::Warn, "mean_mass_mismatch", "closed form and quadrature disagree"});
    if (out.variance_t0.residual > 1e-4)
        out.diagnostics.push_back({Severity::Warn, "variance_identity_mismatch",
                                   "equal-time variance differs from 2 <dm>^2"});
    return out;
}

}  // namespace vacmech
