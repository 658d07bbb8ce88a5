#include <array>
#include <cmath>
#include <complex>

#include "doctest.h"
#include "vacmech/cavity.hpp"

using namespace vacmech;
using doctest::Approx;

namespace {

// Two identical frequency-independent mirrors whose loop amplitude is rho_loop.
Cavity constant_loop(double rho_loop, double q = 1.0) {
    const auto m = MirrorModel::constant_lossy(std::sqrt(rho_loop), 0.0);
    return Cavity(m, m, q);
}

Cavity point_cavity(double big_omega, double q) {
    return Cavity(MirrorModel::point(big_omega), MirrorModel::point(big_omega), q);
}

Cavity transparent_cavity(double q = 1.0) {
    return Cavity(MirrorModel::transparent(), MirrorModel::transparent(), q);
}

// Independent evaluation of g, delta from the loop amplitude z.
double airy_oracle(std::complex<double> z) { return (1.0 - std::norm(z)) / std::norm(1.0 - z); }
double phase_oracle(std::complex<double> z) { return -std::arg(1.0 - z); }

std::complex<double> point_loop(double big_omega, double q, double w) {
    const std::complex<double> r = -big_omega / std::complex<double>(big_omega, -w);
    return r * r * std::polar(1.0, 2.0 * w * q);
}

}  // namespace

TEST_SUITE("cavity") {

TEST_CASE("transparent mirrors leave free space") {
    const auto c = transparent_cavity();
    for (double w : {0.0, 0.3, 2.0, 40.0}) {
        CHECK(airy(c, w) == 1.0);
        CHECK(phase_shift(c, w) == 0.0);
        CHECK(time_delay_analytic(c, w) == 0.0);
    }
    CHECK(c.is_transparent());
}

TEST_CASE("Airy function at resonance and antiresonance") {
    const auto c = constant_loop(0.5);
    CHECK(airy(c, kPi) == Approx(3.0).epsilon(1e-14));
    CHECK(airy(c, 0.5 * kPi) == Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(airy(c, 0.25 * kPi) == Approx(0.6).epsilon(1e-14));
}

TEST_CASE("phase shift of a constant loop") {
    const auto c = constant_loop(0.5);
    CHECK(phase_shift(c, 0.5 * kPi) == Approx(0.0));
    CHECK(phase_shift(c, 0.25 * kPi) == Approx(std::atan(0.5)).epsilon(1e-14));
    CHECK(phase_shift(c, 0.25 * kPi) == Approx(0.46365).epsilon(1e-5));
}

TEST_CASE("time delay of a constant loop") {
    const auto c = constant_loop(0.5);
    CHECK(time_delay_analytic(c, 0.25 * kPi) == Approx(-0.4).epsilon(1e-14));
    CHECK(time_delay_analytic(c, kPi) == Approx(2.0).epsilon(1e-14));
    const double h = suggested_delay_step(c, 0.25 * kPi);
    CHECK(time_delay_numeric(c, 0.25 * kPi, h).value == Approx(-0.4).epsilon(1e-9));
}

TEST_CASE("g, delta and tau agree with the loop-amplitude oracle") {
    for (double q : {0.5, 1.0, 3.0})
        for (double w = 1e-2; w < 1e2; w *= 1.29) {
            const auto z = point_loop(1.0, q, w);
            const auto ev = evaluate(point_cavity(1.0, q), w);
            CHECK(ev.g == Approx(airy_oracle(z)).epsilon(1e-10));
            CHECK(ev.g >= 0.0);
            CHECK(std::remainder(ev.delta - phase_oracle(z), 2.0 * kPi) == Approx(0.0).epsilon(1e-12));
            CHECK(ev.one_minus_g == Approx(1.0 - airy_oracle(z)).epsilon(1e-9).scale(1.0));
        }
}

TEST_CASE("Airy function has the analytic limit at zero frequency") {
    for (auto [o1, o2, q] : {std::array{1.0, 1.0, 1.0}, {1.0, 3.0, 0.5}, {0.2, 5.0, 2.0}}) {
        const Cavity c(MirrorModel::point(o1), MirrorModel::point(o2), q);
        const double a = 1.0 / o1 + 1.0 / o2 + 2.0 * q;
        const double expected = (1.0 / (o1 * o1) + 1.0 / (o2 * o2)) / (a * a);
        CHECK(airy(c, 0.0) == Approx(expected).epsilon(1e-10));
        for (double w : {1e-4, 1e-6, 1e-9}) CHECK(airy(c, w) == Approx(expected).epsilon(1e-7));
    }
}

TEST_CASE("weak reflection: delta follows the first-order loop phase") {
    for (double rho : {1e-2, 1e-3})
        for (double w = 0.05; w < 6.0; w += 0.37) {
            const auto c = constant_loop(rho, 1.0);
            CHECK(std::abs(phase_shift(c, w) - rho * std::sin(2.0 * w)) <= rho * rho);
        }
}

TEST_CASE("delay decomposition matches the numeric derivative of delta") {
    for (double q : {1.0, 10.0})
        for (double w = 1e-2 / q; w <= 1e2 / q; w *= 1.11) {
            const auto c = point_cavity(1.0, q);
            const double analytic = time_delay_analytic(c, w);
            const auto numeric = time_delay_numeric(c, w, suggested_delay_step(c, w));
            CHECK(std::abs(analytic - numeric.value) <= 1e-6 * std::max(1.0, std::abs(analytic)));
        }
}

TEST_CASE("delay decomposition with dispersive lossy mirrors") {
    const Cavity c(MirrorModel::constant_lossy(0.9, 0.4, 3.0), MirrorModel::constant_lossy(0.7, -0.2, 5.0), 1.3);
    for (double w = 0.05; w < 20.0; w *= 1.23) {
        const double analytic = time_delay_analytic(c, w);
        const auto numeric = time_delay_numeric(c, w, suggested_delay_step(c, w));
        CHECK(std::abs(analytic - numeric.value) <= 1e-6 * std::max(1.0, std::abs(analytic)));
    }
}

TEST_CASE("single mirror: no cavity, no delay") {
    const Cavity c(MirrorModel::point(1.0), MirrorModel::transparent(), 1.0);
    for (double w : {0.1, 1.0, 7.0}) {
        CHECK(airy(c, w) == 1.0);
        CHECK(time_delay_analytic(c, w) == 0.0);
        CHECK(time_delay_numeric(c, w, 0.05).value == Approx(0.0));
    }
}

TEST_CASE("an ideal mirror exactly on resonance is a pole, not a crash") {
    const auto ideal = MirrorModel::tabulated({{0.0, {-1.0, 0.0}}, {10.0, {-1.0, 0.0}}});
    const Cavity c(ideal, ideal, 1.0);
    const auto ev = evaluate(c, kPi);
    CHECK(ev.pole);
    CHECK_THROWS_AS((void)airy(c, kPi), PoleError);
    CHECK_THROWS_AS((void)time_delay_analytic(c, kPi), PoleError);
    try {
        (void)phase_shift(c, kPi);
    } catch (const PoleError& e) {
        CHECK(e.omega() == kPi);
    }
    CHECK_FALSE(evaluate(c, 0.9 * kPi).pole);
}

TEST_CASE("invalid arguments") {
    CHECK_THROWS_AS(Cavity(MirrorModel::point(1.0), MirrorModel::point(1.0), 0.0), DomainError);
    const auto c = point_cavity(1.0, 1.0);
    CHECK_THROWS_AS((void)evaluate(c, -0.1), DomainError);
    CHECK_THROWS_AS((void)time_delay_numeric(c, 0.1, 0.2), DomainError);
    CHECK_THROWS_AS((void)resonances(c, 0), DomainError);
}

TEST_CASE("resonances of a high-finesse cavity sit at multiples of pi/q") {
    const auto m = MirrorModel::constant_lossy(0.99, 0.0);
    const auto found = resonances(Cavity(m, m, 1.0), 3);
    REQUIRE(found.omegas.size() == 3);
    CHECK(std::abs(found.omegas[0] - kPi) < 1e-3);
    CHECK(std::abs(found.omegas[1] - 2.0 * kPi) < 1e-3);
}

TEST_CASE("resonances of the point-scatterer cavity") {
    const auto c = point_cavity(100.0, 1.0);
    const auto found = resonances(c, 5);
    REQUIRE(found.omegas.size() == 5);
    for (std::size_t n = 1; n <= 5; ++n)
        CHECK(std::abs(found.omegas[n - 1] - n * kPi) <= 0.02 * n * kPi);
    CHECK(transparent_cavity().is_transparent());
    CHECK(resonances(transparent_cavity(), 4).omegas.empty());
}

TEST_CASE("short search ranges return fewer maxima with a diagnostic") {
    const auto c = point_cavity(1.0, 1.0);
    const auto found = resonances(c, 500);
    CHECK(found.omegas.size() < 500);
    REQUIRE_FALSE(found.diagnostics.empty());
    CHECK(found.diagnostics.back().severity == Severity::Warn);
}

}
