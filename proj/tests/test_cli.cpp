#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "vacmech/cli.hpp"

using namespace vacmech;
using namespace vacmech::cli;

namespace {

const char* kPointCavity =
    R"("cavity": {"m1": {"type": "point", "omega_c": 1}, "m2": {"type": "point", "omega_c": 1}, "q": 1})";

Json document(const std::string& body) { return Json::parse("{" + body + "}"); }

std::vector<std::string> violations_of(const Json& doc) {
    try {
        (void)parse_config(doc);
    } catch (const ConfigError& e) {
        return e.violations();
    }
    return {};
}

bool mentions(const std::vector<std::string>& list, const std::string& needle) {
    for (const auto& s : list)
        if (s.find(needle) != std::string::npos) return true;
    return false;
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

Json without_timestamp(Json doc) {
    doc["provenance"].erase("generated_at");
    return doc;
}

// Every numeric block must carry an error estimate and its cutoff.
void check_schema(const Json& node, const std::string& path) {
    if (node.is_object()) {
        if (node.contains("value") || node.contains("samples") || node.contains("omegas")) {
            CHECK_MESSAGE(node.contains("error_estimate"), path);
            CHECK_MESSAGE(node.contains("uv_cutoff"), path);
        }
        for (const auto& [k, v] : node.items()) check_schema(v, path + "." + k);
    } else if (node.is_array()) {
        for (std::size_t i = 0; i < node.size(); ++i) check_schema(node[i], path + "[" + std::to_string(i) + "]");
    }
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("minimal force configuration is valid") {
    const auto c = parse_config(document(R"("command": "force", )" + std::string(kPointCavity)));
    CHECK(c.command == Command::Force);
    REQUIRE(c.cavity.has_value());
    CHECK(c.cavity->q == 1.0);
    REQUIRE(c.cavity->m1.as<PointScatterer>() != nullptr);
    CHECK(c.cavity->m1.as<PointScatterer>()->omega_c == 1.0);
    CHECK(c.output.format == Format::Json);
}

TEST_CASE("configuration text and file entry points") {
    const std::string text = R"({"command": "force", )" + std::string(kPointCavity) + "}";
    CHECK(parse_config_text(text).command == Command::Force);
    CHECK(parse_config_file(std::string(VACMECH_TEST_DATA) + "/transparent.json").command == Command::Force);
    CHECK_THROWS_AS((void)parse_config_file("/nonexistent/run.json"), ConfigError);
    CHECK_THROWS_AS((void)parse_config_text("{not json"), ConfigError);
}

TEST_CASE("non-monotone sweep values are named") {
    const auto v = violations_of(document(R"("command": "sweep", )" + std::string(kPointCavity) +
                                          R"(, "sweep": {"command": "energy", "variable": "q", "values": [1, 0.5, 2]})"));
    CHECK(mentions(v, "sweep.values"));
}

TEST_CASE("mass needs the scatterer block alone") {
    const auto v = violations_of(document(R"("command": "mass", )" + std::string(kPointCavity) +
                                          R"(, "scatterer": {"omega_c": 1, "uv_cutoff": 10})"));
    CHECK(mentions(v, "mass requires scatterer only"));
}

TEST_CASE("all violations are listed, including unknown keys") {
    const auto v = violations_of(Json::parse(read_file(std::string(VACMECH_TEST_DATA) + "/bad.json")));
    CHECK(v.size() >= 4);
    CHECK(mentions(v, "colour"));
    CHECK(mentions(v, "sweep.values"));
    CHECK(mentions(v, "mass requires scatterer only"));

    const auto nested = violations_of(document(R"("command": "force", "cavity": {"m1": {"type": "point", "omega": 1},
        "m2": {"type": "mirror"}, "q": -1})"));
    CHECK(nested.size() >= 3);
    CHECK(mentions(nested, "cavity.m1"));
    CHECK(mentions(nested, "cavity.m2"));

    CHECK(mentions(violations_of(document(R"("command": "force")")), "force requires"));
    CHECK(mentions(violations_of(document(R"("command": "launch")")), "command"));
    CHECK(mentions(violations_of(document(R"("command": "mass", "scatterer": {"omega_c": 1})")), "uv_cutoff"));
}

TEST_CASE("enumerations round-trip") {
    for (auto c : {Command::Force, Command::Energy, Command::Spectrum, Command::Mass, Command::Sweep,
                   Command::Resonances})
        CHECK(parse_command(to_string(c)) == c);
    CHECK_FALSE(parse_command("launch").has_value());
    CHECK(std::string(to_string(Format::Csv)) == "csv");
    CHECK(std::string(to_string(SweepVariable::OmegaC)) == "omega_c");
}

TEST_CASE("configuration echo round-trips") {
    const char* configs[] = {
        R"({"command": "force", "cavity": {"m1": {"type": "constant_lossy", "rho": 0.9, "phi": 0.2, "cutoff": 50},
            "m2": {"type": "tabulated", "samples": [[0, -0.9, 0], [2, -0.3, 0.1], [5, 0, 0]]}, "q": 2},
            "thermal": {"temperature": 0.01}, "quadrature": {"rel_tol": 1e-8, "segmentation": "uniform-in-phase"}})",
        R"({"command": "mass", "scatterer": {"m_b": 2, "omega_c": 1.5, "uv_cutoff": 10},
            "grid": {"omega_min": 0.01, "omega_max": 1, "points": 7, "spacing": "linear"},
            "output": {"format": "csv", "path": "out.csv"}})",
        R"({"command": "sweep", "cavity": {"m1": {"type": "point", "omega_c": 1}, "m2": {"type": "point", "omega_c": 2}, "q": 1},
            "sweep": {"command": "force", "variable": "omega_c", "values": [3, 2, 1]}, "resonances": {"n_max": 4}})",
    };
    for (const char* text : configs) {
        const RunConfig first = parse_config_text(text);
        const Json echo = to_json(first);
        const RunConfig second = parse_config(echo);
        CHECK(to_json(second) == echo);
    }
}

TEST_CASE("force on transparent mirrors") {
    const auto record = run(parse_config_file(std::string(VACMECH_TEST_DATA) + "/transparent.json"));
    const Json& d = record.document;
    CHECK(d["schema_version"] == "1");
    CHECK(d["results"]["force"]["value"] == 0.0);
    CHECK(d["diagnostics"].empty());
    CHECK(record.exit_code == kExitOk);
    check_schema(d["results"], "results");
}

TEST_CASE("spectrum CSV has one row per grid point") {
    const auto config = parse_config_file(std::string(VACMECH_TEST_DATA) + "/spectrum.json");
    const auto record = run(config);
    const auto rows = lines(render(record, Format::Csv));
    REQUIRE(rows.size() == 101);
    CHECK(rows.front() == "omega,g,delta,tau");
    CHECK(record.document["results"]["spectrum"]["samples"].size() == 100);
    check_schema(record.document["results"], "results");
}

TEST_CASE("energy sweep echoes the swept length") {
    auto config = parse_config(document(R"("command": "sweep", )" + std::string(kPointCavity) +
                                        R"(, "sweep": {"command": "energy", "variable": "q", "values": [0.5, 1, 2]},
                                            "quadrature": {"rel_tol": 1e-8})"));
    const auto record = run(config);
    const Json& records = record.document["results"]["records"];
    REQUIRE(records.size() == 3);
    const double expected[] = {0.5, 1.0, 2.0};
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(records[i]["q"] == expected[i]);
        CHECK(records[i]["results"]["phase_repr"]["value"].get<double>() < 0.0);
    }
    CHECK(record.exit_code == kExitOk);
    check_schema(record.document["results"], "results");
    const auto rows = lines(render(record, Format::Csv));
    CHECK(rows.front().rfind("q,", 0) == 0);
}

TEST_CASE("mass and resonance outputs follow the schema") {
    const auto mass = run(parse_config(document(
        R"("command": "mass", "scatterer": {"omega_c": 1, "uv_cutoff": 10}, "grid": {"points": 5})")));
    check_schema(mass.document["results"], "results");
    CHECK(lines(render(mass, Format::Csv)).front() == "omega,c_mm,asymptote,ratio");
    CHECK(mass.document["provenance"]["cutoffs"]["scheme"] == "sharp");
    CHECK(mass.exit_code == kExitOk);
    CHECK(mass.document["diagnostics"][0]["code"] == "recoil_regime");

    const auto res = run(parse_config(document(R"("command": "resonances", )" + std::string(kPointCavity) +
                                               R"(, "resonances": {"n_max": 3})")));
    check_schema(res.document["results"], "results");
    CHECK(res.document["results"]["resonances"]["count"] == 3);
    CHECK(lines(render(res, Format::Csv)).front() == "n,omega");
}

TEST_CASE("numerical failures become error diagnostics and a nonzero exit code") {
    const auto record = run(parse_config(document(
        R"("command": "force", "cavity": {"m1": {"type": "constant_lossy", "rho": 0.5},
            "m2": {"type": "constant_lossy", "rho": 0.5}, "q": 1})")));
    CHECK(record.exit_code == kExitNumerical);
    REQUIRE(record.document["diagnostics"].size() == 1);
    CHECK(record.document["diagnostics"][0]["severity"] == "error");
    CHECK(record.document["diagnostics"][0]["code"] == "unsupported_model");
}

TEST_CASE("identical configurations give identical output") {
    const auto config = parse_config(document(R"("command": "energy", )" + std::string(kPointCavity) +
                                              R"(, "quadrature": {"rel_tol": 1e-8})"));
    const auto a = run(config);
    const auto b = run(config);
    CHECK(without_timestamp(a.document).dump() == without_timestamp(b.document).dump());
    CHECK(render(a, Format::Csv) == render(b, Format::Csv));
    check_schema(a.document["results"], "results");
}

TEST_CASE("CSV cells round-trip doubles") {
    for (double x : {0.1, -1.0 / 3.0, 6.02214076e23, 5e-324, 0.0}) CHECK(std::strtod(csv_cell(x).c_str(), nullptr) == x);
    CHECK(csv_cell(std::nan("")) == "");
    CHECK(csv_cell(0.5) == "5.0000000000000000e-01");
}

TEST_CASE("emit writes files and reports I/O failures with the path") {
    const auto record = run(parse_config_file(std::string(VACMECH_TEST_DATA) + "/transparent.json"));
    const auto path = std::filesystem::temp_directory_path() / "vacmech_emit_test.json";
    emit(record, Format::Json, path.string());
    CHECK(Json::parse(read_file(path)) == record.document);
    std::filesystem::remove(path);

    const std::string bad = "/nonexistent-dir/out.csv";
    try {
        emit(record, Format::Csv, bad);
        FAIL("expected an I/O error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find(bad) != std::string::npos);
    }
}

}
