#include "vacmech/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "vacmech/mirrors.hpp"

namespace vacmech {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = std::numeric_limits<double>::min();
// Error estimates below this multiple of eps * int |f| are round-off noise.
constexpr double kRoundoffFactor = 50.0;

// 21-point Kronrod extension of the 10-point Gauss rule. Node tables come from
// Boost; the Gauss nodes are the odd-indexed Kronrod nodes.
struct KronrodRule {
    std::array<double, 11> x{};
    std::array<double, 11> wk{};
    std::array<double, 5> wg{};

    KronrodRule() {
        using boost::math::quadrature::gauss;
        using boost::math::quadrature::gauss_kronrod;
        const auto& kx = gauss_kronrod<double, 21>::abscissa();
        const auto& kw = gauss_kronrod<double, 21>::weights();
        const auto& gw = gauss<double, 10>::weights();
        std::copy(kx.begin(), kx.end(), x.begin());
        std::copy(kw.begin(), kw.end(), wk.begin());
        std::copy(gw.begin(), gw.end(), wg.begin());
    }
};

const KronrodRule& rule() {
    static const KronrodRule r;
    return r;
}

struct Segment {
    double a;
    double b;
    double value;
    double error;
    double resabs;
    bool nonfinite;
};

Segment apply_rule(const RealFunction& f, double a, double b) {
    const auto& R = rule();
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    bool nonfinite = false;
    auto eval = [&](double x) {
        const double v = f(x);
        if (!std::isfinite(v)) {
            nonfinite = true;
            return 0.0;
        }
        return v;
    };

    std::array<double, 21> fv{};
    fv[0] = eval(c);
    double resk = R.wk[0] * fv[0];
    double resg = 0.0;
    double resabs = R.wk[0] * std::abs(fv[0]);
    for (std::size_t j = 1; j < 11; ++j) {
        const double dx = h * R.x[j];
        const double f1 = eval(c - dx);
        const double f2 = eval(c + dx);
        fv[2 * j - 1] = f1;
        fv[2 * j] = f2;
        resk += R.wk[j] * (f1 + f2);
        resabs += R.wk[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1) resg += R.wg[(j - 1) / 2] * (f1 + f2);
    }
    const double mean = 0.5 * resk;
    double resasc = R.wk[0] * std::abs(fv[0] - mean);
    for (std::size_t j = 1; j < 11; ++j)
        resasc += R.wk[j] * (std::abs(fv[2 * j - 1] - mean) + std::abs(fv[2 * j] - mean));

    const double ah = std::abs(h);
    double err = std::abs((resk - resg) * h);
    resasc *= ah;
    resabs *= ah;
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    if (resabs > kTiny / (50.0 * kEps)) err = std::max(50.0 * kEps * resabs, err);
    if (nonfinite) err = std::max(err, std::abs(resk * h));
    return {a, b, resk * h, err, resabs, nonfinite};
}

struct WorseFirst {
    bool operator()(const Segment& l, const Segment& r) const {
        if (l.error != r.error) return l.error < r.error;
        return l.a > r.a;
    }
};

// Neumaier-compensated sum.
struct CompensatedSum {
    double sum = 0.0;
    double c = 0.0;
    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            c += (sum - t) + x;
        else
            c += (x - t) + sum;
        sum = t;
    }
    [[nodiscard]] double value() const { return sum + c; }
};

bool at_roundoff_floor(const Segment& s) {
    if (s.nonfinite) return false;
    const double width_floor = 64.0 * kEps * std::max(std::abs(s.a), std::abs(s.b));
    return s.error <= 50.0 * kEps * s.resabs * 1.0000001 || (s.b - s.a) <= width_floor;
}

double sign_of(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

const char* to_string(Segmentation s) {
    return s == Segmentation::ResonanceAware ? "resonance-aware" : "uniform-in-phase";
}

std::optional<Segmentation> parse_segmentation(const std::string& s) {
    if (s == "resonance-aware") return Segmentation::ResonanceAware;
    if (s == "uniform-in-phase") return Segmentation::UniformInPhase;
    return std::nullopt;
}

void QuadratureSpec::validate() const {
    if (!(rel_tol > 0.0)) throw DomainError("quadrature.rel_tol must be > 0");
    if (!(abs_tol >= 0.0)) throw DomainError("quadrature.abs_tol must be >= 0");
    if (max_segments < 1) throw DomainError("quadrature.max_segments must be >= 1");
    if (!(uv_cutoff >= 0.0)) throw DomainError("quadrature.uv_cutoff must be >= 0");
}

IntegralResult& IntegralResult::operator+=(const IntegralResult& other) {
    value += other.value;
    error_estimate += other.error_estimate;
    segments_used += other.segments_used;
    append(diagnostics, other.diagnostics);
    if (other.uv_cutoff) uv_cutoff = other.uv_cutoff;
    return *this;
}

IntegralResult integrate_adaptive(const RealFunction& f, double a, double b, const QuadratureSpec& spec,
                                  std::span<const double> markers) {
    spec.validate();
    if (!(a <= b) || !std::isfinite(a) || !std::isfinite(b))
        throw DomainError("integrate_adaptive needs finite a <= b");
    IntegralResult out;
    if (a == b) return out;

    std::vector<double> cuts{a};
    for (double m : markers)
        if (m > a && m < b) cuts.push_back(m);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::priority_queue<Segment, std::vector<Segment>, WorseFirst> active;
    std::vector<Segment> retired;
    double total = 0.0;
    double total_err = 0.0;
    double total_abs = 0.0;  // integral of |f|, sets the round-off floor
    bool saw_nonfinite = false;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        Segment s = apply_rule(f, cuts[i], cuts[i + 1]);
        saw_nonfinite |= s.nonfinite;
        total += s.value;
        total_err += s.error;
        total_abs += s.resabs;
        if (at_roundoff_floor(s))
            retired.push_back(s);
        else
            active.push(s);
    }
    std::size_t segments = cuts.size() - 1;
    bool exhausted = false;
    std::size_t since_resum = 0;

    bool floor_limited = false;
    while (!active.empty()) {
        const double tol = std::max(spec.abs_tol, spec.rel_tol * std::abs(total));
        if (total_err <= tol) break;
        if (total_err <= kRoundoffFactor * kEps * total_abs) {
            floor_limited = true;
            break;
        }
        if (segments >= spec.max_segments) {
            exhausted = true;
            break;
        }
        Segment worst = active.top();
        active.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        Segment left = apply_rule(f, worst.a, mid);
        Segment right = apply_rule(f, mid, worst.b);
        saw_nonfinite |= left.nonfinite || right.nonfinite;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        total_abs += left.resabs + right.resabs - worst.resabs;
        ++segments;
        for (const Segment& s : {left, right}) {
            if (at_roundoff_floor(s))
                retired.push_back(s);
            else
                active.push(s);
        }
        // Re-sum periodically so the running totals do not drift.
        if (++since_resum == 4096) {
            since_resum = 0;
            CompensatedSum v, e, m;
            auto copy = active;
            while (!copy.empty()) {
                v.add(copy.top().value);
                e.add(copy.top().error);
                m.add(copy.top().resabs);
                copy.pop();
            }
            for (const auto& s : retired) {
                v.add(s.value);
                e.add(s.error);
                m.add(s.resabs);
            }
            total = v.value();
            total_err = e.value();
            total_abs = m.value();
        }
    }

    std::vector<Segment> all = std::move(retired);
    all.reserve(all.size() + active.size());
    while (!active.empty()) {
        all.push_back(active.top());
        active.pop();
    }
    std::sort(all.begin(), all.end(), [](const Segment& l, const Segment& r) { return l.a < r.a; });
    CompensatedSum v, e;
    for (const auto& s : all) {
        v.add(s.value);
        e.add(s.error);
    }
    out.value = v.value();
    out.error_estimate = e.value();
    out.segments_used = segments;

    const double tol = std::max(spec.abs_tol, spec.rel_tol * std::abs(out.value));
    if (exhausted && out.error_estimate > tol) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "reached %zu segments with error estimate %.3e above tolerance %.3e",
                      segments, out.error_estimate, tol);
        out.diagnostics.push_back({Severity::Warn, "max_segments_exhausted", buf});
    }
    else if (floor_limited || out.error_estimate > tol)
        out.diagnostics.push_back({Severity::Info, "roundoff_limited",
                                   "error estimate limited by floating-point round-off"});
    if (saw_nonfinite)
        out.diagnostics.push_back({Severity::Warn, "nonfinite_integrand",
                                   "integrand was non-finite at isolated nodes (pole); those nodes were excluded"});
    return out;
}

namespace {

// First sign change of f in [a, a + 2 half_period], refined by bisection.
double align_to_zero(const RealFunction& f, double a, double half_period) {
    constexpr int kScan = 64;
    const double step = 2.0 * half_period / kScan;
    double x0 = a;
    double f0 = f(x0);
    for (int i = 1; i <= kScan; ++i) {
        const double x1 = a + i * step;
        const double f1 = f(x1);
        if (f0 == 0.0) return x0;
        if (sign_of(f0) * sign_of(f1) < 0.0) {
            double lo = x0, hi = x1, flo = f0;
            for (int it = 0; it < 80 && hi - lo > 4.0 * kEps * hi; ++it) {
                const double m = 0.5 * (lo + hi);
                const double fm = f(m);
                if (sign_of(fm) == sign_of(flo)) {
                    lo = m;
                    flo = fm;
                } else {
                    hi = m;
                }
            }
            return 0.5 * (lo + hi);
        }
        x0 = x1;
        f0 = f1;
    }
    return a;
}

// m-fold iterated averaging of the last m + 1 partial sums.
double averaged_estimate(const std::vector<double>& partial, std::size_t depth) {
    const std::size_t n = partial.size();
    const std::size_t m = std::min(depth, n - 1);
    std::vector<double> level(partial.end() - static_cast<std::ptrdiff_t>(m + 1), partial.end());
    for (std::size_t k = 0; k < m; ++k)
        for (std::size_t j = 0; j + 1 < level.size() - k; ++j) level[j] = 0.5 * (level[j] + level[j + 1]);
    return level.front();
}

}  // namespace

IntegralResult integrate_oscillatory_tail(const RealFunction& f, double a, double half_period,
                                          const QuadratureSpec& spec) {
    spec.validate();
    if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("integrate_oscillatory_tail needs finite a > 0");
    if (!(half_period > 0.0)) throw DomainError("integrate_oscillatory_tail needs half_period > 0");

    constexpr std::size_t kDepth = 14;
    constexpr std::size_t kFirstCheckpoint = 16;
    constexpr double kGrowth = 1.5;
    const std::size_t max_windows = std::clamp<std::size_t>(spec.max_segments / 2, 64, 200000);

    IntegralResult out;
    QuadratureSpec window = spec;
    window.uv_cutoff = 0.0;

    const double start = align_to_zero(f, a, half_period);
    if (start > a) out += integrate_adaptive(f, a, start, window);

    // Quarter windows Q_j. The window terms T_k = Q_{2k}/2 + Q_{2k+1} + Q_{2k+2}/2
    // average the half-period windows with a copy shifted by a quarter period:
    // this cancels the non-alternating drift of the second harmonic, which has
    // exactly one period per window.
    const double quarter = 0.5 * half_period;
    double window_err = 0.0;
    std::size_t window_segments = 0;
    auto quarter_window = [&](std::size_t j) {
        const double lo = start + static_cast<double>(j) * quarter;
        IntegralResult w = integrate_adaptive(f, lo, lo + quarter, window);
        window_err += w.error_estimate;
        window_segments += w.segments_used;
        append(out.diagnostics, w.diagnostics);
        return w.value;
    };

    const double q0 = quarter_window(0);
    double q_even = q0;
    double magnitude = std::abs(q0);
    bool floor_limited = false;
    CompensatedSum running;
    std::vector<double> terms;
    std::vector<double> partial;  // P_k = sum_{j <= 2k+1} Q_j + (Q_{2k+2} - Q_0) / 2

    std::vector<double> checkpoints;
    std::vector<double> extrapolated;
    std::size_t next_checkpoint = kFirstCheckpoint;
    std::size_t checkpoint_index = 0;
    double estimate = 0.0;
    double estimate_error = kInf;
    bool converged = false;
    bool alternating = true;

    for (std::size_t k = 0; k < max_windows; ++k) {
        const double q_odd = quarter_window(2 * k + 1);
        const double q_next = quarter_window(2 * k + 2);
        terms.push_back(0.5 * q_even + q_odd + 0.5 * q_next);
        running.add(q_even);
        running.add(q_odd);
        partial.push_back(running.value() + 0.5 * (q_next - q0));
        q_even = q_next;
        magnitude += std::abs(q_odd) + std::abs(q_next);

        // Summing many alternating windows loses digits; no estimate is better
        // than the round-off accumulated in the partial sums.
        const double requested =
            std::max(spec.abs_tol, spec.rel_tol * (std::abs(out.value) + std::abs(running.value())));
        const double floor = 32.0 * kEps * magnitude;
        floor_limited = floor > requested;
        const double tol = std::max(requested, floor);

        if (terms.size() >= 3) {
            const double t0 = terms[terms.size() - 3], t1 = terms[terms.size() - 2], t2 = terms.back();
            // Window integrals that have fallen below tolerance carry no sign information.
            if (std::abs(t0) + std::abs(t1) + std::abs(t2) <= tol) {
                estimate = partial.back() + 0.5 * q0;
                estimate_error = std::abs(t0) + std::abs(t1) + std::abs(t2);
                converged = true;
                break;
            }
            if (terms.size() >= 4 && !(sign_of(t0) * sign_of(t1) < 0.0 && sign_of(t1) * sign_of(t2) < 0.0)) {
                alternating = false;
                break;
            }
        }
        if (partial.size() != next_checkpoint) continue;

        // Averaging removes the alternation; what remains converges like a power
        // of the frequency, so checkpoints sit at geometrically growing frequencies
        // and are extrapolated with Aitken's process.
        checkpoints.push_back(averaged_estimate(partial, kDepth) + 0.5 * q0);
        ++checkpoint_index;
        const double span = start * (std::pow(kGrowth, static_cast<double>(checkpoint_index)) - 1.0) / half_period;
        next_checkpoint = std::max(static_cast<std::size_t>(kGrowth * static_cast<double>(next_checkpoint)),
                                   static_cast<std::size_t>(std::ceil(span)));

        const std::size_t c = checkpoints.size();
        estimate = checkpoints.back();
        if (c >= 2) estimate_error = std::abs(checkpoints[c - 1] - checkpoints[c - 2]);
        if (c >= 3) {
            const double a0 = checkpoints[c - 3], a1 = checkpoints[c - 2], a2 = checkpoints[c - 1];
            const double d1 = a1 - a0, d2 = a2 - a1;
            const double ratio = d1 != 0.0 ? d2 / d1 : 0.0;
            const double accelerated = (d1 != 0.0 && std::abs(ratio) < 0.9) ? a2 - d2 * ratio / (ratio - 1.0) : a2;
            extrapolated.push_back(accelerated);
            const std::size_t e = extrapolated.size();
            if (e >= 2) {
                const double spread = std::abs(extrapolated[e - 1] - extrapolated[e - 2]);
                if (spread < estimate_error) {
                    estimate = extrapolated.back();
                    estimate_error = spread;
                }
            }
        }
        if (c >= 2 && estimate_error <= tol) {
            converged = true;
            break;
        }
    }

    if (!alternating) {
        out.diagnostics.push_back({Severity::Warn, "non_alternating_tail",
                                   "window integrals stopped alternating beyond omega = " + std::to_string(start)});
        if (spec.uv_cutoff > start) {
            IntegralResult trunc = integrate_adaptive(f, start, spec.uv_cutoff, window);
            trunc.uv_cutoff = spec.uv_cutoff;
            out += trunc;
            out.error_estimate += window_err;
            return out;
        }
        // Plain summation until the half-period integrals become negligible.
        const std::size_t done = 2 * terms.size() + 1;
        CompensatedSum plain;
        plain.add(running.value());
        plain.add(q_even);
        estimate_error = kInf;
        for (std::size_t j = done; j < 2 * max_windows; j += 2) {
            const double w = quarter_window(j) + quarter_window(j + 1);
            plain.add(w);
            const double tol = std::max(spec.abs_tol, spec.rel_tol * (std::abs(out.value) + std::abs(plain.value())));
            if (std::abs(w) <= tol) {
                estimate_error = std::abs(w);
                converged = true;
                break;
            }
        }
        estimate = plain.value();
        if (!converged) {
            estimate_error = std::abs(estimate);
            out.diagnostics.push_back({Severity::Warn, "tail_truncated",
                                       "tail summation stopped after the maximum number of windows"});
        }
    } else if (!converged) {
        if (!std::isfinite(estimate_error)) estimate_error = std::abs(estimate);
        out.diagnostics.push_back({Severity::Warn, "tail_not_converged",
                                   "oscillatory tail did not settle within " + std::to_string(max_windows) +
                                       " windows"});
    }

    if (converged && floor_limited)
        out.diagnostics.push_back({Severity::Info, "roundoff_limited",
                                   "oscillatory tail accuracy limited by floating-point round-off"});
    out.value += estimate;
    out.error_estimate += estimate_error + window_err;
    out.segments_used += window_segments;
    return out;
}

IntegralResult wick_axis_value(const ImaginaryLoopEvaluator& loop_at_imaginary, double q,
                               const QuadratureSpec& spec) {
    if (!(q > 0.0)) throw DomainError("wick_axis_value needs q > 0");
    auto integrand = [&](double xi) {
        const std::complex<double> z = loop_at_imaginary(xi) * std::exp(-2.0 * xi * q);
        if (z.imag() == 0.0) return std::log1p(-z.real()) / (2.0 * kPi);
        return 0.5 * std::log(std::norm(1.0 - z)) / (2.0 * kPi);
    };
    // e^{-2 xi q} < e^{-80} beyond xi = 40/q.
    const double upper = 40.0 / q;
    std::array<double, 10> markers{};
    const std::array<double, 10> fractions{1e-8, 1e-6, 1e-4, 1e-2, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0};
    for (std::size_t i = 0; i < markers.size(); ++i) markers[i] = fractions[i] / q;
    QuadratureSpec s = spec;
    s.uv_cutoff = 0.0;
    return integrate_adaptive(integrand, 0.0, upper, s, markers);
}

}  // namespace vacmech
