#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "vacmech/cli.hpp"

namespace vacmech::cli {
namespace {

std::string join(const std::vector<std::string>& parts, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

/// Reads one JSON object, collecting violations under a dotted path.
class Reader {
public:
    Reader(const Json& obj, std::string path, std::vector<std::string>& errors)
        : obj_(obj), path_(std::move(path)), errors_(errors) {
        if (!obj_.is_object()) fail(path_.empty() ? "document" : path_, "must be an object");
    }

    [[nodiscard]] bool ok() const { return obj_.is_object(); }
    [[nodiscard]] bool has(const char* key) const { return ok() && obj_.contains(key); }
    [[nodiscard]] std::string at(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

    /// Flags keys outside `allowed`.
    void allow(std::initializer_list<const char*> allowed) {
        if (!ok()) return;
        std::vector<std::string> unknown;
        for (const auto& [k, _] : obj_.items())
            if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; }))
                unknown.push_back(at(k.c_str()));
        if (!unknown.empty()) errors_.push_back("unknown keys: " + join(unknown, ", "));
    }

    std::optional<double> number(const char* key, bool required = false) {
        if (!has(key)) {
            if (required) fail(at(key), "is required");
            return std::nullopt;
        }
        const Json& v = obj_.at(key);
        if (!v.is_number()) {
            fail(at(key), "must be a number");
            return std::nullopt;
        }
        return v.get<double>();
    }

    std::optional<std::string> string(const char* key, bool required = false) {
        if (!has(key)) {
            if (required) fail(at(key), "is required");
            return std::nullopt;
        }
        const Json& v = obj_.at(key);
        if (!v.is_string()) {
            fail(at(key), "must be a string");
            return std::nullopt;
        }
        return v.get<std::string>();
    }

    std::optional<std::size_t> count(const char* key) {
        if (!has(key)) return std::nullopt;
        const Json& v = obj_.at(key);
        if (!v.is_number_integer() || v.get<long long>() < 1) {
            fail(at(key), "must be a positive integer");
            return std::nullopt;
        }
        return static_cast<std::size_t>(v.get<long long>());
    }

    [[nodiscard]] const Json& child(const char* key) const { return obj_.at(key); }

    void fail(const std::string& where, const std::string& what) { errors_.push_back(where + " " + what); }

private:
    const Json& obj_;
    std::string path_;
    std::vector<std::string>& errors_;
};

std::optional<MirrorModel> parse_mirror(const Json& j, const std::string& path, std::vector<std::string>& errors) {
    Reader r(j, path, errors);
    if (!r.ok()) return std::nullopt;
    const auto type = r.string("type", true);
    if (!type) return std::nullopt;
    try {
        if (*type == "point") {
            r.allow({"type", "omega_c"});
            const auto w = r.number("omega_c", true);
            if (!w) return std::nullopt;
            return MirrorModel::point(*w);
        }
        if (*type == "constant_lossy") {
            r.allow({"type", "rho", "phi", "cutoff"});
            const auto rho = r.number("rho", true);
            const auto phi = r.number("phi");
            const auto cutoff = r.number("cutoff");
            if (!rho) return std::nullopt;
            return MirrorModel::constant_lossy(*rho, phi.value_or(0.0), cutoff.value_or(kInf));
        }
        if (*type == "tabulated") {
            r.allow({"type", "samples"});
            if (!r.has("samples") || !r.child("samples").is_array()) {
                r.fail(r.at("samples"), "must be an array of [omega, re, im] triples");
                return std::nullopt;
            }
            std::vector<TabulatedSample> samples;
            for (const auto& s : r.child("samples")) {
                if (!s.is_array() || s.size() != 3 || !s[0].is_number() || !s[1].is_number() || !s[2].is_number()) {
                    r.fail(r.at("samples"), "entries must be [omega, re, im] number triples");
                    return std::nullopt;
                }
                samples.push_back({s[0].get<double>(), {s[1].get<double>(), s[2].get<double>()}});
            }
            return MirrorModel::tabulated(std::move(samples));
        }
        r.fail(r.at("type"), "must be one of point, constant_lossy, tabulated");
    } catch (const DomainError& e) {
        r.fail(path, std::string(": ") + e.what());
    }
    return std::nullopt;
}

std::optional<SweepVariable> parse_variable(const std::string& s) {
    if (s == "q") return SweepVariable::Q;
    if (s == "T") return SweepVariable::T;
    if (s == "omega_c") return SweepVariable::OmegaC;
    return std::nullopt;
}

bool needs_cavity(Command c) { return c == Command::Force || c == Command::Energy || c == Command::Spectrum || c == Command::Resonances; }

void check_invariants(const RunConfig& c, std::vector<std::string>& errors) {
    const Command target = c.command == Command::Sweep && c.sweep ? c.sweep->command : c.command;
    if (c.command == Command::Sweep && !c.sweep) errors.push_back("sweep requires a sweep block");
    if (c.command != Command::Sweep && c.sweep) errors.push_back("sweep block is only valid for command sweep");
    if (target == Command::Mass) {
        if (c.cavity || !c.scatterer) errors.push_back("mass requires scatterer only (no cavity block)");
    } else if (needs_cavity(target)) {
        if (!c.cavity || c.scatterer)
            errors.push_back(std::string(to_string(target)) + " requires cavity only (no scatterer block)");
    }
    if (c.cavity && !(c.cavity->q > 0.0 && std::isfinite(c.cavity->q))) errors.push_back("cavity.q must be finite and > 0");
    if (c.scatterer) {
        try {
            c.scatterer->validate();
        } catch (const DomainError& e) {
            errors.push_back(e.what());
        }
        if (!std::isfinite(c.scatterer->uv_cutoff)) errors.push_back("scatterer.uv_cutoff is required and must be finite");
    }
    try {
        c.thermal.validate();
    } catch (const DomainError& e) {
        errors.push_back(e.what());
    }
    try {
        c.quadrature.validate();
    } catch (const DomainError& e) {
        errors.push_back(e.what());
    }
    if (c.grid.omega_min && !(*c.grid.omega_min > 0.0)) errors.push_back("grid.omega_min must be > 0");
    if (c.grid.omega_min && c.grid.omega_max && !(*c.grid.omega_max > *c.grid.omega_min))
        errors.push_back("grid.omega_max must exceed grid.omega_min");
    if (c.grid.points < 2) errors.push_back("grid.points must be >= 2");
    if (c.sweep) {
        const auto& s = *c.sweep;
        if (s.command == Command::Sweep) errors.push_back("sweep.command cannot be sweep");
        if (s.values.empty()) errors.push_back("sweep.values must not be empty");
        bool up = true, down = true;
        for (std::size_t i = 1; i < s.values.size(); ++i) {
            up &= s.values[i] > s.values[i - 1];
            down &= s.values[i] < s.values[i - 1];
        }
        if (!(up || down)) errors.push_back("sweep.values must be strictly monotone");
        if (s.variable == SweepVariable::Q && !c.cavity) errors.push_back("sweep.variable q needs a cavity block");
        if (s.variable == SweepVariable::OmegaC && c.cavity &&
            (!c.cavity->m1.as<PointScatterer>() || !c.cavity->m2.as<PointScatterer>()))
            errors.push_back("sweep.variable omega_c needs point mirrors");
        for (double v : s.values) {
            const bool ok = s.variable == SweepVariable::T ? (v >= 0.0 && std::isfinite(v)) : (v > 0.0 && std::isfinite(v));
            if (!ok) {
                errors.push_back(std::string("sweep.values out of range for ") + to_string(s.variable));
                break;
            }
        }
    }
}

}  // namespace

const char* to_string(Command c) {
    switch (c) {
        case Command::Force: return "force";
        case Command::Energy: return "energy";
        case Command::Spectrum: return "spectrum";
        case Command::Mass: return "mass";
        case Command::Sweep: return "sweep";
        case Command::Resonances: return "resonances";
    }
    return "force";
}

std::optional<Command> parse_command(const std::string& s) {
    for (Command c : {Command::Force, Command::Energy, Command::Spectrum, Command::Mass, Command::Sweep,
                      Command::Resonances})
        if (s == to_string(c)) return c;
    return std::nullopt;
}

const char* to_string(Format f) { return f == Format::Csv ? "csv" : "json"; }

const char* to_string(SweepVariable v) {
    switch (v) {
        case SweepVariable::Q: return "q";
        case SweepVariable::T: return "T";
        case SweepVariable::OmegaC: return "omega_c";
    }
    return "q";
}

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::runtime_error("invalid configuration: " + join(violations, "; ")), violations_(std::move(violations)) {}

RunConfig parse_config(const Json& doc) {
    std::vector<std::string> errors;
    RunConfig c;
    Reader top(doc, "", errors);
    if (!top.ok()) throw ConfigError(errors);
    top.allow({"command", "cavity", "scatterer", "thermal", "quadrature", "grid", "sweep", "resonances", "output"});

    if (const auto cmd = top.string("command", true)) {
        if (const auto parsed = parse_command(*cmd))
            c.command = *parsed;
        else
            errors.push_back("command must be one of force, energy, spectrum, mass, sweep, resonances");
    }

    if (top.has("cavity")) {
        Reader r(top.child("cavity"), "cavity", errors);
        r.allow({"m1", "m2", "q"});
        CavityBlock cav;
        bool complete = true;
        for (const char* key : {"m1", "m2"}) {
            if (!r.has(key)) {
                r.fail(r.at(key), "is required");
                complete = false;
                continue;
            }
            auto m = parse_mirror(r.child(key), r.at(key), errors);
            if (!m) {
                complete = false;
                continue;
            }
            (std::string(key) == "m1" ? cav.m1 : cav.m2) = std::move(*m);
        }
        const auto q = r.number("q", true);
        if (q) cav.q = *q;
        if (complete && q) c.cavity = std::move(cav);
    }

    if (top.has("scatterer")) {
        Reader r(top.child("scatterer"), "scatterer", errors);
        r.allow({"m_b", "omega_c", "uv_cutoff"});
        PointScattererSpec s;
        s.m_b = r.number("m_b").value_or(0.0);
        const auto w = r.number("omega_c", true);
        const auto cutoff = r.number("uv_cutoff", true);
        if (w) s.omega_c = *w;
        if (cutoff) s.uv_cutoff = *cutoff;
        if (w && cutoff) c.scatterer = s;
    }

    if (top.has("thermal")) {
        Reader r(top.child("thermal"), "thermal", errors);
        r.allow({"temperature"});
        c.thermal.temperature = r.number("temperature").value_or(0.0);
    }

    if (top.has("quadrature")) {
        Reader r(top.child("quadrature"), "quadrature", errors);
        r.allow({"rel_tol", "abs_tol", "max_segments", "uv_cutoff", "segmentation"});
        if (const auto v = r.number("rel_tol")) c.quadrature.rel_tol = *v;
        if (const auto v = r.number("abs_tol")) c.quadrature.abs_tol = *v;
        if (const auto v = r.count("max_segments")) c.quadrature.max_segments = *v;
        if (const auto v = r.number("uv_cutoff")) c.quadrature.uv_cutoff = *v;
        if (const auto v = r.string("segmentation")) {
            if (const auto s = parse_segmentation(*v))
                c.quadrature.segmentation = *s;
            else
                r.fail(r.at("segmentation"), "must be resonance-aware or uniform-in-phase");
        }
    }

    if (top.has("grid")) {
        Reader r(top.child("grid"), "grid", errors);
        r.allow({"omega_min", "omega_max", "points", "spacing"});
        c.grid.omega_min = r.number("omega_min");
        c.grid.omega_max = r.number("omega_max");
        if (const auto v = r.count("points")) c.grid.points = *v;
        if (const auto v = r.string("spacing")) {
            if (*v == "log" || *v == "linear")
                c.grid.logarithmic = *v == "log";
            else
                r.fail(r.at("spacing"), "must be log or linear");
        }
    }

    if (top.has("sweep")) {
        Reader r(top.child("sweep"), "sweep", errors);
        r.allow({"command", "variable", "values"});
        SweepBlock s;
        bool complete = true;
        if (const auto v = r.string("command", true)) {
            if (const auto cmd = parse_command(*v))
                s.command = *cmd;
            else {
                r.fail(r.at("command"), "is not a known command");
                complete = false;
            }
        } else {
            complete = false;
        }
        if (const auto v = r.string("variable", true)) {
            if (const auto var = parse_variable(*v))
                s.variable = *var;
            else {
                r.fail(r.at("variable"), "must be q, T or omega_c");
                complete = false;
            }
        } else {
            complete = false;
        }
        if (!r.has("values") || !r.child("values").is_array()) {
            r.fail(r.at("values"), "must be an array of numbers");
            complete = false;
        } else {
            for (const auto& v : r.child("values")) {
                if (!v.is_number()) {
                    r.fail(r.at("values"), "must contain only numbers");
                    complete = false;
                    break;
                }
                s.values.push_back(v.get<double>());
            }
        }
        if (complete) c.sweep = std::move(s);
    }

    if (top.has("resonances")) {
        Reader r(top.child("resonances"), "resonances", errors);
        r.allow({"n_max"});
        if (const auto v = r.count("n_max")) c.n_max = *v;
    }

    if (top.has("output")) {
        Reader r(top.child("output"), "output", errors);
        r.allow({"format", "path"});
        if (const auto v = r.string("format")) {
            if (*v == "json" || *v == "csv")
                c.output.format = *v == "csv" ? Format::Csv : Format::Json;
            else
                r.fail(r.at("format"), "must be csv or json");
        }
        if (const auto v = r.string("path")) c.output.path = *v;
    }

    check_invariants(c, errors);
    if (!errors.empty()) throw ConfigError(errors);
    return c;
}

RunConfig parse_config_text(const std::string& text) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ConfigError({std::string("malformed JSON: ") + e.what()});
    }
    return parse_config(doc);
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({"cannot read config file " + path});
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

void validate(const RunConfig& config) {
    std::vector<std::string> errors;
    check_invariants(config, errors);
    if (!errors.empty()) throw ConfigError(errors);
}

Json mirror_to_json(const MirrorModel& m) {
    Json j;
    if (const auto* p = m.as<PointScatterer>()) {
        j["type"] = "point";
        j["omega_c"] = p->omega_c;
    } else if (const auto* c = m.as<ConstantLossy>()) {
        j["type"] = "constant_lossy";
        j["rho"] = c->rho;
        j["phi"] = c->phi;
        if (std::isfinite(c->cutoff)) j["cutoff"] = c->cutoff;
    } else if (const auto* t = m.as<Tabulated>()) {
        j["type"] = "tabulated";
        Json samples = Json::array();
        for (const auto& s : t->samples) samples.push_back({s.omega, s.r.real(), s.r.imag()});
        j["samples"] = samples;
    }
    return j;
}

Json to_json(const RunConfig& c) {
    Json j;
    j["command"] = to_string(c.command);
    if (c.cavity) j["cavity"] = {{"m1", mirror_to_json(c.cavity->m1)}, {"m2", mirror_to_json(c.cavity->m2)}, {"q", c.cavity->q}};
    if (c.scatterer)
        j["scatterer"] = {{"m_b", c.scatterer->m_b}, {"omega_c", c.scatterer->omega_c}, {"uv_cutoff", c.scatterer->uv_cutoff}};
    j["thermal"] = {{"temperature", c.thermal.temperature}};
    j["quadrature"] = {{"rel_tol", c.quadrature.rel_tol},
                       {"abs_tol", c.quadrature.abs_tol},
                       {"max_segments", c.quadrature.max_segments},
                       {"uv_cutoff", c.quadrature.uv_cutoff},
                       {"segmentation", to_string(c.quadrature.segmentation)}};
    Json grid;
    if (c.grid.omega_min) grid["omega_min"] = *c.grid.omega_min;
    if (c.grid.omega_max) grid["omega_max"] = *c.grid.omega_max;
    grid["points"] = c.grid.points;
    grid["spacing"] = c.grid.logarithmic ? "log" : "linear";
    j["grid"] = grid;
    if (c.sweep)
        j["sweep"] = {{"command", to_string(c.sweep->command)},
                      {"variable", to_string(c.sweep->variable)},
                      {"values", c.sweep->values}};
    j["resonances"] = {{"n_max", c.n_max}};
    j["output"] = {{"format", to_string(c.output.format)}, {"path", c.output.path}};
    return j;
}

}  // namespace vacmech::cli
