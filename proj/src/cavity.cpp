#include "vacmech/cavity.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>

#include <boost/math/tools/minima.hpp>

namespace vacmech {
namespace {

constexpr double kTwoPi = 2.0 * kPi;
// Below this fraction of the smallest scale a DC-singular loop is evaluated
// at the threshold itself; the stable forms are exact there to O(w^2).
constexpr double kDcClamp = 1e-8;

bool is_near_minus_one(const ComplexAmplitude& s) { return std::abs(s) < 0.5; }

// Bracketing solve of round_trip_phase(w) = target for w in [start, limit].
// Assumes round_trip_phase(start) < target.
std::optional<double> solve_round_trip(const Cavity& cav, double target, double start,
                                       double limit) {
    const double step = kPi / (4.0 * cav.length());
    double a = start;
    double b = start + step;
    while (cav.round_trip_phase(b) < target) {
        a = b;
        b += step;
        if (a > limit) return std::nullopt;
    }
    for (int it = 0; it < 200 && (b - a) > 4.0 * std::numeric_limits<double>::epsilon() * b; ++it) {
        const double m = 0.5 * (a + b);
        if (cav.round_trip_phase(m) < target)
            a = m;
        else
            b = m;
    }
    const double root = 0.5 * (a + b);
    if (root > limit) return std::nullopt;
    return root;
}

}  // namespace

Cavity::Cavity(MirrorModel mirror1, MirrorModel mirror2, double q)
    : m1_(std::move(mirror1)), m2_(std::move(mirror2)), q_(q) {
    if (!(q > 0.0) || !std::isfinite(q)) throw DomainError("cavity length q must be finite and > 0");
    const double p0 = m1_.phase(0.0) + m2_.phase(0.0);
    phase_offset_ = kTwoPi * std::ceil((p0 - kPi) / kTwoPi);
    singular_at_dc_ = std::abs(one_minus_loop(0.0)) < 1e-12;
}

ComplexAmplitude Cavity::loop(double omega) const {
    return m1_.reflection(omega) * m2_.reflection(omega);
}

ComplexAmplitude Cavity::loop_derivative(double omega) const {
    return m1_.reflection_derivative(omega) * m2_.reflection(omega) +
           m1_.reflection(omega) * m2_.reflection_derivative(omega);
}

ComplexAmplitude Cavity::one_minus_loop(double omega) const {
    const ComplexAmplitude s1 = m1_.one_plus_reflection(omega);
    const ComplexAmplitude s2 = m2_.one_plus_reflection(omega);
    // r_i = s_i - 1, so 1 - r1 r2 = s1 + s2 - s1 s2; exact where both r_i -> -1.
    if (is_near_minus_one(s1) && is_near_minus_one(s2)) return s1 + s2 - s1 * s2;
    return 1.0 - loop(omega);
}

double Cavity::one_minus_loop_modulus_sq(double omega) const {
    const double a1 = m1_.one_minus_modulus_sq(omega);
    const double a2 = m2_.one_minus_modulus_sq(omega);
    return a1 + a2 - a1 * a2;
}

double Cavity::loop_phase(double omega) const {
    return m1_.phase(omega) + m2_.phase(omega) - phase_offset_;
}

double Cavity::round_trip_phase(double omega) const {
    return 2.0 * omega * q_ + loop_phase(omega);
}

bool Cavity::is_transparent() const noexcept {
    return m1_.is_transparent() || m2_.is_transparent();
}

bool Cavity::is_high_frequency_transparent() const noexcept {
    return is_transparent() ||
           (m1_.is_high_frequency_transparent() && m2_.is_high_frequency_transparent());
}

double Cavity::smallest_scale() const noexcept {
    double s = 1.0 / q_;
    for (double m : {m1_.scale(), m2_.scale()})
        if (m > 0.0 && std::isfinite(m)) s = std::min(s, m);
    return s;
}

double Cavity::crossover() const noexcept {
    double s = kPi / q_;
    if (!is_transparent())
        for (double m : {m1_.scale(), m2_.scale()})
            if (std::isfinite(m)) s = std::max(s, m);
    return 20.0 * s;
}

CavityEvaluation evaluate(const Cavity& cavity, double omega) {
    if (!(omega >= 0.0)) throw DomainError("cavity evaluation: frequency must be >= 0");
    CavityEvaluation ev;
    ev.omega = omega;

    double w = omega;
    if (cavity.singular_at_dc()) w = std::max(w, kDcClamp * cavity.smallest_scale());

    const double q = cavity.length();
    const double theta = 2.0 * w * q;
    const double half = std::sin(0.5 * theta);
    const ComplexAmplitude one_minus_phasor(2.0 * half * half, -std::sin(theta));
    const ComplexAmplitude phasor = std::polar(1.0, theta);

    const ComplexAmplitude r = cavity.loop(w);
    const ComplexAmplitude dr = cavity.loop_derivative(w);
    ev.z = r * phasor;
    ev.one_minus_z = cavity.one_minus_loop(w) + r * one_minus_phasor;
    ev.one_minus_rho_sq = cavity.one_minus_loop_modulus_sq(w);
    ev.rho = std::abs(r);
    ev.phi = cavity.loop_phase(w);
    if (ev.rho > 0.0) {
        const ComplexAmplitude rdr = std::conj(r) * dr;
        ev.drho = std::real(rdr) / ev.rho;
        ev.dphi = std::imag(rdr) / (ev.rho * ev.rho);
    }

    const double d2 = std::norm(ev.one_minus_z);
    if (d2 < 1e-26 && ev.one_minus_rho_sq < 1e-12) {
        ev.pole = true;
        ev.g = kInf;
        ev.one_minus_g = -kInf;
        ev.delta = std::numeric_limits<double>::quiet_NaN();
        ev.tau = std::numeric_limits<double>::quiet_NaN();
        return ev;
    }

    ev.g = ev.one_minus_rho_sq / d2;
    // 1 - g = -2 Re[z / (1 - z)], free of the cancellation in 1 - g near resonances.
    ev.one_minus_g = -2.0 * std::real(ev.z / ev.one_minus_z);
    ev.delta = -std::arg(ev.one_minus_z);
    // g / (1 - rho^2) is evaluated as 1/|1 - z|^2, the same quantity without the 0/0 at rho = 1.
    ev.tau = -ev.one_minus_g * (q + 0.5 * ev.dphi) + std::sin(theta + ev.phi) * ev.drho / d2;
    return ev;
}

namespace {
const CavityEvaluation& require_regular(const CavityEvaluation& ev) {
    if (ev.pole)
        throw PoleError(ev.omega, "cavity pole: |1 - r e^{2iwq}| = 0 at omega = " +
                                      std::to_string(ev.omega));
    return ev;
}
}  // namespace

double airy(const Cavity& cavity, double omega) {
    const auto ev = evaluate(cavity, omega);
    return require_regular(ev).g;
}

double phase_shift(const Cavity& cavity, double omega) {
    const auto ev = evaluate(cavity, omega);
    return require_regular(ev).delta;
}

double time_delay_analytic(const Cavity& cavity, double omega) {
    const auto ev = evaluate(cavity, omega);
    return require_regular(ev).tau;
}

SpectralSample spectral_sample(const Cavity& cavity, double omega) {
    const auto ev = evaluate(cavity, omega);
    return {omega, ev.g, ev.delta, ev.tau};
}

DerivativeEstimate time_delay_numeric(const Cavity& cavity, double omega, double h, double rel_tol) {
    if (!(h > 0.0) || !(omega > h))
        throw DomainError("time_delay_numeric needs omega > h > 0");

    auto central = [&](double step) {
        return (phase_shift(cavity, omega + step) - phase_shift(cavity, omega - step)) / (2.0 * step);
    };

    constexpr int kTab = 12;
    constexpr double kShrink = 1.4;
    constexpr double kShrink2 = kShrink * kShrink;
    std::array<std::array<double, kTab>, kTab> a{};

    double step = h;
    a[0][0] = central(step);
    double best = a[0][0];
    double err = std::numeric_limits<double>::max();
    for (int i = 1; i < kTab; ++i) {
        step /= kShrink;
        a[0][i] = central(step);
        double fac = kShrink2;
        for (int j = 1; j <= i; ++j) {
            a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1.0);
            fac *= kShrink2;
            const double e = std::max(std::abs(a[j][i] - a[j - 1][i]),
                                      std::abs(a[j][i] - a[j - 1][i - 1]));
            if (e <= err) {
                err = e;
                best = a[j][i];
            }
        }
        // Leading steps can sit outside the asymptotic regime; judge growth only after a few.
        if (i >= 4 && std::abs(a[i][i] - a[i - 1][i - 1]) >= 2.0 * err) break;
    }

    if (err > rel_tol * std::max(1.0, std::abs(best)))
        throw ConvergenceError(best, err,
                               "time_delay_numeric: Richardson refinement did not converge at omega = " +
                                   std::to_string(omega));
    return {best, err};
}

double suggested_delay_step(const Cavity& cavity, double omega) {
    const auto ev = evaluate(cavity, omega);
    const double q = cavity.length();
    const ComplexAmplitude dz =
        (cavity.loop_derivative(omega) + ComplexAmplitude(0.0, 2.0 * q) * cavity.loop(omega)) *
        std::polar(1.0, 2.0 * omega * q);
    double h = std::min({0.5 * omega, 0.1 / q, 0.1 * cavity.smallest_scale()});
    if (std::abs(dz) > 0.0) h = std::min(h, 0.1 * std::abs(ev.one_minus_z) / std::abs(dz));
    return h;
}

std::vector<double> phase_markers(const Cavity& cavity, double omega_max, bool include_mirror_phase) {
    std::vector<double> out;
    const double q = cavity.length();
    if (!include_mirror_phase) {
        for (long k = 1;; ++k) {
            const double w = static_cast<double>(k) * kPi / (2.0 * q);
            if (w >= omega_max) break;
            out.push_back(w);
        }
        return out;
    }
    const double phi0 = cavity.round_trip_phase(0.0);
    double k = std::floor(phi0 / kPi) + 1.0;
    double from = 0.0;
    while (true) {
        auto root = solve_round_trip(cavity, k * kPi, from, omega_max);
        if (!root || *root >= omega_max) break;
        if (*root > 0.0) out.push_back(*root);
        from = *root;
        k += 1.0;
    }
    return out;
}

ResonanceSearch resonances(const Cavity& cavity, std::size_t n_max) {
    if (n_max < 1) throw DomainError("resonances: n_max must be >= 1");
    ResonanceSearch out;
    if (cavity.is_transparent()) {
        out.diagnostics.push_back({Severity::Info, "no_resonances", "transparent mirror: g is identically 1"});
        return out;
    }
    const double limit = cavity.crossover();
    const double phi0 = cavity.round_trip_phase(0.0);
    // First resonance strictly above w = 0.
    double n = std::floor(phi0 / kTwoPi) + 1.0;
    double from = 0.0;
    auto g_at = [&](double w) { return evaluate(cavity, w).g; };

    while (out.omegas.size() < n_max) {
        const double lo_target = kTwoPi * n - kPi;
        std::optional<double> lo =
            lo_target <= phi0 ? std::optional<double>(0.0) : solve_round_trip(cavity, lo_target, from, limit);
        std::optional<double> hi = lo ? solve_round_trip(cavity, kTwoPi * n + kPi, *lo, limit) : std::nullopt;
        if (!lo || !hi) {
            out.diagnostics.push_back(
                {Severity::Warn, "fewer_resonances",
                 "found " + std::to_string(out.omegas.size()) + " of " + std::to_string(n_max) +
                     " maxima below the working cutoff " + std::to_string(limit)});
            break;
        }
        const auto [w_peak, neg_g] = boost::math::tools::brent_find_minima(
            [&](double w) { return -g_at(w); }, *lo, *hi, std::numeric_limits<double>::digits / 2);
        const double edge = std::max(g_at(*lo), g_at(*hi));
        if (!(-neg_g > edge * (1.0 + 1e-12))) {
            out.diagnostics.push_back({Severity::Warn, "flat_airy",
                                       "no interior maximum of g between antiresonances near omega = " +
                                           std::to_string(w_peak)});
            break;
        }
        out.omegas.push_back(w_peak);
        // The next window opens at the antiresonance that closes this one.
        n += 1.0;
        from = w_peak;
    }
    return out;
}

}  // namespace vacmech
