#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <functional>
#include <future>
#include <limits>

#include "vacmech/cli.hpp"

namespace vacmech::cli {
namespace {

struct Partial {
    Json results = Json::object();
    Diagnostics diagnostics;
    Table table;
};

void add_observable_row(Table& t, const std::string& label, const IntegralResult& r) {
    t.rows.push_back({label, csv_cell(r.value), csv_cell(r.error_estimate), csv_cell(r.uv_cutoff.value_or(std::nan("")))});
}

Table observable_table() {
    Table t;
    t.header = {"observable", "value", "error_estimate", "uv_cutoff"};
    return t;
}

std::vector<std::string> cells(std::initializer_list<double> xs) {
    std::vector<std::string> out;
    for (double x : xs) out.push_back(csv_cell(x));
    return out;
}

Cavity make_cavity(const RunConfig& c) { return Cavity(c.cavity->m1, c.cavity->m2, c.cavity->q); }

std::vector<double> make_grid(const GridBlock& g, double lo_default, double hi_default) {
    const double lo = g.omega_min.value_or(lo_default);
    const double hi = g.omega_max.value_or(hi_default);
    if (!(hi > lo) || !(lo > 0.0)) throw DomainError("grid needs 0 < omega_min < omega_max");
    if (g.logarithmic) return log_grid(lo, hi, g.points);
    std::vector<double> out(g.points);
    for (std::size_t i = 0; i < g.points; ++i)
        out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(g.points - 1);
    out.back() = hi;
    return out;
}

void tag(Diagnostics& into, const Diagnostics& from, const std::string& source, Json& sink) {
    append(into, from);
    for (const auto& d : diagnostics_json(from, source)) sink.push_back(d);
}

Partial run_force(const RunConfig& c, Json& diags) {
    Partial p;
    const IntegralResult f = casimir_force(make_cavity(c), c.thermal, c.quadrature);
    p.results["force"] = observable_json(f);
    tag(p.diagnostics, f.diagnostics, "force", diags);
    p.table = observable_table();
    add_observable_row(p.table, "force", f);
    return p;
}

Partial run_energy(const RunConfig& c, Json& diags) {
    Partial p;
    const Cavity cav = make_cavity(c);
    const EnergyBreakdown b = energy_breakdown(cav, c.thermal, c.quadrature);
    p.table = observable_table();
    auto put = [&](const char* name, const IntegralResult& r) {
        p.results[name] = observable_json(r);
        tag(p.diagnostics, r.diagnostics, name, diags);
        add_observable_row(p.table, name, r);
    };
    put("phase_repr", b.phase_repr);
    put("delay_repr", b.delay_repr);
    put("force_route", b.force_route);
    if (b.wick) put("wick", *b.wick);
    p.results["reference_length"] = b.reference_length;
    Json res = {{"phase_delay", b.residuals.phase_delay},
                {"phase_force", b.residuals.phase_force},
                {"delay_force", b.residuals.delay_force}};
    if (b.residuals.phase_wick) res["phase_wick"] = *b.residuals.phase_wick;
    p.results["residuals"] = res;
    tag(p.diagnostics, b.diagnostics, "energy", diags);

    if (c.thermal.is_vacuum()) {
        const QuasistaticSummary s = mass_correction(cav, c.quadrature);
        Json qs;
        for (const auto& [name, r] : {std::pair<const char*, const IntegralResult&>{"force", s.force},
                                      {"kappa", s.kappa},
                                      {"mu", s.mu},
                                      {"einstein_mass", s.einstein_mass},
                                      {"stored_gap", s.stored_gap}}) {
            qs[name] = observable_json(r);
            tag(p.diagnostics, r.diagnostics, std::string("quasistatic.") + name, diags);
            add_observable_row(p.table, std::string("quasistatic.") + name, r);
        }
        p.results["quasistatic"] = qs;
    }
    return p;
}

Partial run_spectrum(const RunConfig& c, Json& diags) {
    Partial p;
    const Cavity cav = make_cavity(c);
    const double q = cav.length();
    const std::vector<double> grid = make_grid(c.grid, 1e-2 / q, 1e2 / q);
    p.table.header = {"omega", "g", "delta", "tau"};
    Json rows = Json::array();
    std::size_t poles = 0;
    for (double w : grid) {
        const CavityEvaluation e = evaluate(cav, w);
        if (e.pole) ++poles;
        p.table.rows.push_back(cells({w, e.g, e.delta, e.tau}));
        rows.push_back({{"omega", w}, {"g", e.g}, {"delta", e.delta}, {"tau", e.tau}});
    }
    // Pointwise closed-form evaluations: no quadrature error, no cutoff.
    p.results["spectrum"] = {{"samples", rows}, {"error_estimate", 0.0}, {"uv_cutoff", nullptr}};
    if (poles) {
        Diagnostics d{{Severity::Warn, "pole_proximity",
                       std::to_string(poles) + " grid points sit on a cavity pole (lossless resonance)"}};
        tag(p.diagnostics, d, "spectrum", diags);
    }
    return p;
}

Partial run_resonances(const RunConfig& c, Json& diags) {
    Partial p;
    const ResonanceSearch r = resonances(make_cavity(c), c.n_max);
    // Maxima are bracketed to half the mantissa bits.
    const double located = r.omegas.empty() ? 0.0 : std::ldexp(r.omegas.back(), 1 - std::numeric_limits<double>::digits / 2);
    p.results["resonances"] = {{"omegas", r.omegas}, {"count", r.omegas.size()}, {"error_estimate", located}, {"uv_cutoff", nullptr}};
    tag(p.diagnostics, r.diagnostics, "resonances", diags);
    p.table.header = {"n", "omega"};
    for (std::size_t i = 0; i < r.omegas.size(); ++i) p.table.rows.push_back({std::to_string(i + 1), csv_cell(r.omegas[i])});
    return p;
}

Partial run_mass(const RunConfig& c, Json& diags) {
    Partial p;
    const PointScattererSpec& s = *c.scatterer;
    const std::vector<double> grid = make_grid(c.grid, 1e-3 * s.omega_c, 10.0 * s.omega_c);
    const MassStatistics m = mass_statistics(s, grid);
    const double lambda = s.uv_cutoff;
    const auto& mc = m.mean_correction;
    p.results["mean_correction"] = observable_json(mc.value, std::abs(mc.value - mc.quadrature) + mc.error_estimate, lambda);
    p.results["mean_correction_quadrature"] = observable_json(mc.quadrature, mc.error_estimate, lambda);
    p.results["mean_correction_residual"] = mc.residual;
    const auto& v = m.variance_t0;
    p.results["variance_t0"] = observable_json(v.value, v.error_estimate, lambda);
    p.results["variance_identity"] = observable_json(v.identity, 2.0 * 2.0 * mc.value * std::abs(mc.value - mc.quadrature), lambda);
    p.results["variance_residual"] = v.residual;
    p.results["validity"] = {{"status", m.validity.status == RecoilStatus::Ok ? "ok" : "warn"},
                             {"ratio", m.validity.ratio},
                             {"message", m.validity.message}};
    Json rows = Json::array();
    double worst = 0.0;
    p.table.header = {"omega", "c_mm", "asymptote", "ratio"};
    for (const auto& pt : m.spectrum) {
        worst = std::max(worst, pt.error_estimate);
        p.table.rows.push_back(cells({pt.omega, pt.c_mm, pt.asymptote, pt.ratio}));
        rows.push_back({{"omega", pt.omega},
                        {"c_mm", pt.c_mm},
                        {"asymptote", pt.asymptote},
                        {"ratio", pt.ratio},
                        {"error_estimate", pt.error_estimate}});
    }
    p.results["spectrum"] = {{"samples", rows}, {"error_estimate", worst}, {"uv_cutoff", lambda}};
    tag(p.diagnostics, m.diagnostics, "mass", diags);
    return p;
}

Partial dispatch(Command cmd, const RunConfig& c, Json& diags) {
    switch (cmd) {
        case Command::Force: return run_force(c, diags);
        case Command::Energy: return run_energy(c, diags);
        case Command::Spectrum: return run_spectrum(c, diags);
        case Command::Resonances: return run_resonances(c, diags);
        case Command::Mass: return run_mass(c, diags);
        case Command::Sweep: break;
    }
    throw DomainError("sweep cannot be nested");
}

/// Runs one computation; numerical exceptions become Error diagnostics.
Partial guarded(Command cmd, const RunConfig& c, Json& diags) {
    auto fail = [&](const char* code, const std::string& what) {
        Partial p;
        Diagnostics d{{Severity::Error, code, what}};
        tag(p.diagnostics, d, to_string(cmd), diags);
        return p;
    };
    try {
        return dispatch(cmd, c, diags);
    } catch (const PoleError& e) {
        return fail("pole", e.what());
    } catch (const ConvergenceError& e) {
        return fail("convergence", e.what());
    } catch (const DivergenceError& e) {
        return fail("divergence", e.what());
    } catch (const UnsupportedModelError& e) {
        return fail("unsupported_model", e.what());
    } catch (const DomainError& e) {
        return fail("domain", e.what());
    }
}

RunConfig with_value(const RunConfig& base, SweepVariable var, double v) {
    RunConfig c = base;
    c.command = base.sweep->command;
    c.sweep.reset();
    switch (var) {
        case SweepVariable::Q: c.cavity->q = v; break;
        case SweepVariable::T: c.thermal.temperature = v; break;
        case SweepVariable::OmegaC:
            if (c.cavity) {
                c.cavity->m1 = MirrorModel::point(v);
                c.cavity->m2 = MirrorModel::point(v);
            }
            if (c.scatterer) c.scatterer->omega_c = v;
            break;
    }
    return c;
}

std::string timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

Json provenance(const RunConfig& c) {
    Json cut;
    cut["quadrature_uv_cutoff"] = c.quadrature.uv_cutoff > 0.0 ? Json(c.quadrature.uv_cutoff) : Json(nullptr);
    if (c.scatterer) {
        cut["scatterer_uv_cutoff"] = c.scatterer->uv_cutoff;
        cut["scheme"] = kCutoffScheme;
    }
    return {{"tool_version", kToolVersion},
            {"quadrature", to_json(c)["quadrature"]},
            {"cutoffs", cut},
            {"generated_at", timestamp()}};
}

}  // namespace

Json observable_json(double value, double error_estimate, std::optional<double> uv_cutoff) {
    return {{"value", value},
            {"error_estimate", error_estimate},
            {"uv_cutoff", uv_cutoff ? Json(*uv_cutoff) : Json(nullptr)}};
}

Json observable_json(const IntegralResult& r) { return observable_json(r.value, r.error_estimate, r.uv_cutoff); }

Json diagnostics_json(const Diagnostics& diags, const std::string& source) {
    Json out = Json::array();
    for (const auto& d : diags)
        out.push_back({{"severity", to_string(d.severity)}, {"code", d.code}, {"message", d.message}, {"source", source}});
    return out;
}

OutputRecord run(const RunConfig& config) {
    validate(config);
    OutputRecord rec;
    Json diags = Json::array();
    Diagnostics all;

    if (config.command == Command::Sweep) {
        const SweepBlock& s = *config.sweep;
        const char* var = to_string(s.variable);
        std::vector<std::future<std::pair<Partial, Json>>> jobs;
        for (double v : s.values)
            jobs.push_back(std::async(std::launch::async, [&config, &s, v] {
                Json local = Json::array();
                Partial p = guarded(s.command, with_value(config, s.variable, v), local);
                return std::make_pair(std::move(p), std::move(local));
            }));
        Json records = Json::array();
        bool first = true;
        for (std::size_t i = 0; i < jobs.size(); ++i) {
            auto [p, local] = jobs[i].get();
            const double v = s.values[i];
            for (auto& d : local) {
                d["source"] = std::string(var) + "=" + Json(v).dump() + ":" + d["source"].get<std::string>();
                diags.push_back(d);
            }
            append(all, p.diagnostics);
            records.push_back({{var, v}, {"results", p.results}});
            if (first && !p.table.header.empty()) {
                rec.table.header = p.table.header;
                rec.table.header.insert(rec.table.header.begin(), var);
                first = false;
            }
            for (auto& row : p.table.rows) {
                row.insert(row.begin(), csv_cell(v));
                rec.table.rows.push_back(std::move(row));
            }
        }
        rec.document["schema_version"] = kSchemaVersion;
        rec.document["inputs"] = to_json(config);
        rec.document["results"] = {{"command", to_string(s.command)}, {"variable", var}, {"records", records}};
    } else {
        Partial p = guarded(config.command, config, diags);
        all = p.diagnostics;
        rec.table = std::move(p.table);
        rec.document["schema_version"] = kSchemaVersion;
        rec.document["inputs"] = to_json(config);
        rec.document["results"] = std::move(p.results);
    }
    rec.document["diagnostics"] = diags;
    rec.document["provenance"] = provenance(config);
    rec.exit_code = has_errors(all) ? kExitNumerical : kExitOk;
    return rec;
}

}  // namespace vacmech::cli
