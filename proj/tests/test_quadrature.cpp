#include <bit>
#include <cmath>
#include <future>

#include "doctest.h"
#include "reference_integrals.hpp"
#include "vacmech/cavity.hpp"
#include "vacmech/quadrature.hpp"

using namespace vacmech;
using doctest::Approx;

namespace {

bool has_code(const Diagnostics& diags, const std::string& code) {
    for (const auto& d : diags)
        if (d.code == code) return true;
    return false;
}

}  // namespace

TEST_SUITE("quadrature") {

TEST_CASE("specification is validated") {
    QuadratureSpec s;
    CHECK_NOTHROW(s.validate());
    s.rel_tol = 0.0;
    CHECK_THROWS_AS(s.validate(), DomainError);
    s = {};
    s.abs_tol = -1.0;
    CHECK_THROWS_AS(s.validate(), DomainError);
    s = {};
    s.max_segments = 0;
    CHECK_THROWS_AS(s.validate(), DomainError);
    s = {};
    s.uv_cutoff = -1.0;
    CHECK_THROWS_AS(s.validate(), DomainError);
    CHECK_THROWS_AS((void)integrate_adaptive([](double) { return 1.0; }, 1.0, 0.0, {}), DomainError);
}

TEST_CASE("segmentation names round-trip") {
    for (auto s : {Segmentation::ResonanceAware, Segmentation::UniformInPhase})
        CHECK(parse_segmentation(to_string(s)) == s);
    CHECK_FALSE(parse_segmentation("sideways").has_value());
}

TEST_CASE("elementary integrals") {
    const QuadratureSpec s;
    const auto lin = integrate_adaptive([](double x) { return x; }, 0.0, 1.0, s);
    CHECK(std::abs(lin.value - 0.5) <= std::max(lin.error_estimate, 1e-15));
    CHECK(lin.error_estimate >= 0.0);

    const auto lorentz = integrate_adaptive([](double w) { return 1.0 / (1.0 + w * w); }, 0.0, 1e3, s);
    CHECK(lorentz.value == Approx(std::atan(1e3)).epsilon(1e-10));
    CHECK(lorentz.value == Approx(1.56980).epsilon(1e-5));
}

TEST_CASE("narrow Airy resonance against a brute-force Riemann sum") {
    // Loop amplitude 0.999: resonance full width about 1e-3 at omega = pi.
    const auto m = MirrorModel::constant_lossy(std::sqrt(0.999), 0.0);
    const Cavity c(m, m, 1.0);
    auto g = [&](double w) { return airy(c, w); };
    const double a = 0.5 * kPi, b = 1.5 * kPi;

    QuadratureSpec s;
    s.rel_tol = 1e-8;
    const std::array<double, 1> markers{kPi};
    const auto r = integrate_adaptive(g, a, b, s, markers);

    // Midpoint sum over one full period; exponentially accurate for periodic integrands.
    const int n = 1'000'000;
    const double h = (b - a) / n;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += g(a + (i + 0.5) * h);
    sum *= h;
    CHECK(std::abs(r.value - sum) <= 1e-8 * std::abs(sum));
    // The mean of the Airy function over a period is 1.
    CHECK(r.value == Approx(kPi).epsilon(1e-8));
}

TEST_CASE("exhausted segment budget is reported") {
    QuadratureSpec s;
    s.max_segments = 3;
    const auto r = integrate_adaptive([](double x) { return std::log(x) * std::sin(40.0 * x); }, 0.0, 1.0, s);
    CHECK(has_code(r.diagnostics, "max_segments_exhausted"));
    CHECK(r.diagnostics.front().severity == Severity::Warn);
    CHECK(r.error_estimate > 0.0);
}

TEST_CASE("results accumulate") {
    IntegralResult a;
    a.value = 1.0;
    a.error_estimate = 0.1;
    a.segments_used = 2;
    a.diagnostics.push_back({Severity::Info, "x", "y"});
    IntegralResult b;
    b.value = 2.0;
    b.error_estimate = 0.2;
    b.segments_used = 3;
    b.uv_cutoff = 7.0;
    a += b;
    CHECK(a.value == 3.0);
    CHECK(a.error_estimate == Approx(0.3));
    CHECK(a.segments_used == 5);
    CHECK(a.diagnostics.size() == 1);
    CHECK(a.uv_cutoff == 7.0);
}

TEST_CASE("oscillatory tails") {
    const QuadratureSpec s;
    auto sinc = [](double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; };
    auto head = integrate_adaptive(sinc, 0.0, 1.0, s);
    head += integrate_oscillatory_tail(sinc, 1.0, kPi, s);
    CHECK(std::abs(head.value - 0.5 * kPi) <= 1e-8);
    CHECK(head.diagnostics.empty());

    auto damped = [](double x) { return std::cos(x) / (1.0 + x * x); };
    auto whole = integrate_adaptive(damped, 0.0, 1.0, s);
    whole += integrate_oscillatory_tail(damped, 1.0, kPi, s);
    CHECK(whole.value == Approx(0.5 * kPi * std::exp(-1.0)).epsilon(1e-9));
    CHECK(whole.value == Approx(0.57786).epsilon(1e-5));

    // Slowly decaying x sin x / (1 + x^2), same value.
    auto slow = [](double x) { return x * std::sin(x) / (1.0 + x * x); };
    auto s2 = integrate_adaptive(slow, 0.0, 1.0, s);
    s2 += integrate_oscillatory_tail(slow, 1.0, kPi, s);
    CHECK(s2.value == Approx(0.5 * kPi * std::exp(-1.0)).epsilon(1e-9));
}

TEST_CASE("tail of a two-harmonic integrand") {
    // The second harmonic completes one full period per window.
    auto f = [](double x) { return std::sin(x) / x + std::sin(2.0 * x) / (x * x); };
    const QuadratureSpec s;
    // int_1^inf sin x / x = pi/2 - Si(1); int_1^inf sin 2x / x^2 = sin 2 - 2 Ci(2).
    const double si1 = 0.94608307036718301494;
    const double ci2 = 0.42298082877486499570;
    const auto r = integrate_oscillatory_tail(f, 1.0, kPi, s);
    CHECK(r.value == Approx(0.5 * kPi - si1 + std::sin(2.0) - 2.0 * ci2).epsilon(1e-9));
}

TEST_CASE("non-alternating tail falls back to truncation with a warning") {
    auto f = [](double x) { return std::sin(x) * std::sin(x) / (x * x); };
    QuadratureSpec s;
    s.uv_cutoff = 200.0;
    const auto r = integrate_oscillatory_tail(f, 1.0, kPi, s);
    CHECK(has_code(r.diagnostics, "non_alternating_tail"));
    REQUIRE(r.uv_cutoff.has_value());
    CHECK(*r.uv_cutoff == 200.0);
    const auto direct = integrate_adaptive(f, 1.0, 200.0, s);
    CHECK(r.value == Approx(direct.value).epsilon(1e-9));
}

TEST_CASE("invalid tail arguments") {
    auto f = [](double x) { return std::sin(x) / x; };
    CHECK_THROWS_AS((void)integrate_oscillatory_tail(f, 0.0, kPi, {}), DomainError);
    CHECK_THROWS_AS((void)integrate_oscillatory_tail(f, 1.0, 0.0, {}), DomainError);
}

TEST_CASE("Wick axis with no reflection gives zero") {
    const auto r = wick_axis_value([](double) { return std::complex<double>(0.0, 0.0); }, 1.0, {});
    CHECK(r.value == 0.0);
    CHECK_THROWS_AS((void)wick_axis_value([](double) { return std::complex<double>(); }, 0.0, {}), DomainError);
}

TEST_CASE("Wick axis for a perfect loop gives the mode-sum value") {
    // (1/2pi) int ln(1 - e^{-2 xi q}) dxi = -pi / (24 q).
    for (double q : {0.5, 1.0, 2.0}) {
        const auto r = wick_axis_value([](double) { return std::complex<double>(1.0, 0.0); }, q, {});
        CHECK(r.value == Approx(-kPi / (24.0 * q)).epsilon(1e-9));
    }
}

TEST_CASE("reported error bounds the true error on the reference battery") {
    for (double tol : {1e-6, 1e-8, 1e-10}) {
        QuadratureSpec s;
        s.rel_tol = tol;
        std::size_t honest = 0;
        const auto battery = testing::reference_battery();
        REQUIRE(battery.size() == 20);
        for (const auto& item : battery) {
            const auto r = item.compute(s);
            const double err = std::abs(r.value - item.exact);
            if (err <= 3.0 * r.error_estimate) ++honest;
            CHECK_MESSAGE(err <= std::max(100.0 * tol * std::abs(item.exact), 1e-13), item.name);
        }
        CHECK(honest >= 19);
    }
}

TEST_CASE("results are bit-identical across runs and threads") {
    const auto battery = testing::reference_battery();
    const QuadratureSpec s;
    std::vector<double> first;
    for (const auto& item : battery) first.push_back(item.compute(s).value);
    std::vector<std::future<double>> jobs;
    for (const auto& item : battery)
        jobs.push_back(std::async(std::launch::async, [&item, &s] { return item.compute(s).value; }));
    for (std::size_t i = 0; i < jobs.size(); ++i)
        CHECK(std::bit_cast<std::uint64_t>(jobs[i].get()) == std::bit_cast<std::uint64_t>(first[i]));
}

}
