#include "vacmech/mirrors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vacmech/diagnostics.hpp"

namespace vacmech {
namespace {

constexpr double kTwoPi = 2.0 * kPi;

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double nearest_branch(double principal, double reference) {
    // Ties resolve toward the principal value (r = -1 from 0 gives +pi).
    return principal + kTwoPi * std::floor((reference - principal) / kTwoPi + 0.5);
}

// Roll-off factor 1/(1 + x^2), x = w/cutoff.
double rolloff(const ConstantLossy& m, double omega) {
    if (std::isinf(m.cutoff)) return 1.0;
    const double x = omega / m.cutoff;
    return 1.0 / (1.0 + x * x);
}

std::size_t segment_index(const std::vector<TabulatedSample>& s, double omega) {
    // Index k with s[k].omega <= omega < s[k+1].omega, clamped to [0, n-2].
    auto it = std::upper_bound(s.begin(), s.end(), omega,
                               [](double w, const TabulatedSample& x) { return w < x.omega; });
    std::size_t k = static_cast<std::size_t>(std::distance(s.begin(), it));
    if (k == 0) return 0;
    return std::min(k - 1, s.size() - 2);
}

ComplexAmplitude tabulated_value(const Tabulated& t, double omega) {
    const auto& s = t.samples;
    if (s.size() == 1) {
        if (omega <= s.front().omega) return s.front().r;
        const double ratio = s.front().omega / omega;
        return s.front().r * ratio * ratio;
    }
    if (omega <= s.front().omega) return s.front().r;
    if (omega >= s.back().omega) {
        const double ratio = s.back().omega / omega;
        return s.back().r * ratio * ratio;
    }
    const std::size_t k = segment_index(s, omega);
    const double t01 = (omega - s[k].omega) / (s[k + 1].omega - s[k].omega);
    return s[k].r + t01 * (s[k + 1].r - s[k].r);
}

// Stabilized central difference: the step never straddles more than one node.
ComplexAmplitude tabulated_derivative(const Tabulated& t, double omega) {
    const auto& s = t.samples;
    double spacing = s.back().omega > 0.0 ? s.back().omega : 1.0;
    if (s.size() > 1) {
        const std::size_t k = segment_index(s, omega);
        spacing = s[k + 1].omega - s[k].omega;
        if (k > 0) spacing = std::min(spacing, s[k].omega - s[k - 1].omega);
        if (k + 2 < s.size()) spacing = std::min(spacing, s[k + 2].omega - s[k + 1].omega);
    }
    double h = 0.25 * spacing;
    if (omega > s.back().omega) h = std::min(h, 1e-4 * omega);
    if (omega - h < 0.0) {
        // one-sided at the origin
        const double hf = std::max(h, 1e-12);
        return (tabulated_value(t, omega + hf) - tabulated_value(t, omega)) / hf;
    }
    return (tabulated_value(t, omega + h) - tabulated_value(t, omega - h)) / (2.0 * h);
}

}  // namespace

MirrorModel MirrorModel::point(double omega_c) {
    if (!(omega_c > 0.0) || !std::isfinite(omega_c))
        throw DomainError("point scatterer needs a finite omega_c > 0");
    return MirrorModel(PointScatterer{omega_c});
}

MirrorModel MirrorModel::constant_lossy(double rho, double phi, double cutoff) {
    if (!(rho >= 0.0 && rho < 1.0))
        throw DomainError("constant_lossy rho must lie in [0, 1)");
    if (!std::isfinite(phi)) throw DomainError("constant_lossy phi must be finite");
    if (!(cutoff > 0.0)) throw DomainError("constant_lossy cutoff must be > 0");
    return MirrorModel(ConstantLossy{rho, phi, cutoff});
}

MirrorModel MirrorModel::tabulated(std::vector<TabulatedSample> samples) {
    if (samples.empty()) throw DomainError("tabulated mirror needs at least one sample");
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const auto& x = samples[k];
        if (!(x.omega >= 0.0) || !std::isfinite(x.omega))
            throw DomainError("tabulated frequencies must be finite and >= 0");
        if (k > 0 && !(x.omega > samples[k - 1].omega))
            throw DomainError("tabulated frequencies must be strictly increasing");
        if (!(std::abs(x.r) <= 1.0))
            throw DomainError("tabulated amplitude violates passivity |r| <= 1 at omega = " +
                              std::to_string(x.omega));
    }
    if (samples.back().omega <= 0.0)
        throw DomainError("tabulated mirror needs a sample at positive frequency");

    MirrorModel m(Tabulated{std::move(samples)});
    const auto& s = std::get<Tabulated>(m.model_).samples;
    m.unwrapped_phase_.reserve(s.size());
    double prev = 0.0;
    for (const auto& x : s) {
        prev = amplitude_phase(x.r, prev).phi;
        m.unwrapped_phase_.push_back(prev);
    }
    return m;
}

ComplexAmplitude MirrorModel::reflection(double omega) const {
    return std::visit(
        Overloaded{
            [&](const PointScatterer& p) {
                return -p.omega_c / ComplexAmplitude(p.omega_c, -omega);
            },
            [&](const ConstantLossy& c) {
                return std::polar(c.rho, c.phi) * rolloff(c, omega);
            },
            [&](const Tabulated& t) { return tabulated_value(t, omega); },
        },
        model_);
}

ComplexAmplitude MirrorModel::one_plus_reflection(double omega) const {
    if (const auto* p = as<PointScatterer>())
        return ComplexAmplitude(0.0, -omega) / ComplexAmplitude(p->omega_c, -omega);
    return 1.0 + reflection(omega);
}

double MirrorModel::one_minus_modulus_sq(double omega) const {
    if (const auto* p = as<PointScatterer>()) {
        const double w2 = omega * omega;
        return w2 / (p->omega_c * p->omega_c + w2);
    }
    return 1.0 - std::norm(reflection(omega));
}

ComplexAmplitude MirrorModel::reflection_derivative(double omega) const {
    return std::visit(
        Overloaded{
            [&](const PointScatterer& p) {
                const ComplexAmplitude d(p.omega_c, -omega);
                return ComplexAmplitude(0.0, -p.omega_c) / (d * d);
            },
            [&](const ConstantLossy& c) {
                if (std::isinf(c.cutoff)) return ComplexAmplitude(0.0, 0.0);
                const double f = rolloff(c, omega);
                return std::polar(c.rho, c.phi) * (-2.0 * omega / (c.cutoff * c.cutoff)) * f * f;
            },
            [&](const Tabulated& t) { return tabulated_derivative(t, omega); },
        },
        model_);
}

double MirrorModel::phase(double omega) const {
    return std::visit(
        Overloaded{
            [&](const PointScatterer& p) { return kPi + std::atan(omega / p.omega_c); },
            [&](const ConstantLossy& c) { return c.phi; },
            [&](const Tabulated& t) {
                const auto& s = t.samples;
                const auto& u = unwrapped_phase_;
                double reference;
                if (omega <= s.front().omega) {
                    reference = u.front();
                } else if (omega >= s.back().omega) {
                    reference = u.back();
                } else {
                    const std::size_t k = segment_index(s, omega);
                    const double t01 = (omega - s[k].omega) / (s[k + 1].omega - s[k].omega);
                    reference = u[k] + t01 * (u[k + 1] - u[k]);
                }
                const ComplexAmplitude r = tabulated_value(t, omega);
                if (r == ComplexAmplitude(0.0, 0.0)) return reference;
                return nearest_branch(std::arg(r), reference);
            },
        },
        model_);
}

double MirrorModel::scale() const noexcept {
    return std::visit(
        Overloaded{
            [](const PointScatterer& p) { return p.omega_c; },
            [](const ConstantLossy& c) { return c.rho == 0.0 ? 0.0 : c.cutoff; },
            [](const Tabulated& t) { return t.samples.back().omega; },
        },
        model_);
}

bool MirrorModel::is_transparent() const noexcept {
    if (const auto* c = as<ConstantLossy>()) return c->rho == 0.0;
    if (const auto* t = as<Tabulated>())
        return std::all_of(t->samples.begin(), t->samples.end(),
                           [](const TabulatedSample& x) { return x.r == ComplexAmplitude(0.0, 0.0); });
    return false;
}

bool MirrorModel::is_high_frequency_transparent() const noexcept {
    if (const auto* c = as<ConstantLossy>()) return c->rho == 0.0 || std::isfinite(c->cutoff);
    return true;
}

std::optional<ComplexAmplitude> MirrorModel::reflection_imaginary(double xi) const {
    if (const auto* p = as<PointScatterer>())
        return ComplexAmplitude(-p->omega_c / (p->omega_c + xi), 0.0);
    if (const auto* c = as<ConstantLossy>()) {
        // The finite roll-off has a pole at i*cutoff, so only the bare constant continues.
        if (c->rho == 0.0) return ComplexAmplitude(0.0, 0.0);
        if (std::isinf(c->cutoff)) return std::polar(c->rho, c->phi);
    }
    return std::nullopt;
}

ComplexAmplitude reflect(const MirrorModel& model, double omega) {
    if (!(omega >= 0.0)) throw DomainError("reflect: frequency must be >= 0");
    return model.reflection(omega);
}

AmplitudePhase amplitude_phase(ComplexAmplitude r, double previous_phase) {
    const double rho = std::abs(r);
    if (rho == 0.0) return {0.0, previous_phase};
    return {rho, nearest_branch(std::arg(r), previous_phase)};
}

ScatteringPair scattering_pair(const MirrorModel& model, double omega) {
    if (!(omega >= 0.0)) throw DomainError("scattering_pair: frequency must be >= 0");
    ScatteringPair p{};
    p.r = model.reflection(omega);
    p.s = model.one_plus_reflection(omega);
    p.det = (p.s - p.r) * (p.s + p.r);
    p.unitarity_residual = std::norm(p.s) + std::norm(p.r) - 1.0;
    p.cross_term = std::real(p.s * std::conj(p.r));
    return p;
}

double mirror_delay(const MirrorModel& model, double omega) {
    if (!(omega >= 0.0)) throw DomainError("mirror_delay: frequency must be >= 0");
    if (const auto* p = model.as<PointScatterer>())
        return p->omega_c / (p->omega_c * p->omega_c + omega * omega);
    const ComplexAmplitude r = model.reflection(omega);
    const double n = std::norm(r);
    if (n == 0.0) return 0.0;
    return std::imag(std::conj(r) * model.reflection_derivative(omega)) / n;
}

}  // namespace vacmech
