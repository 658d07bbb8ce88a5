// Batch front end: vacmech <command> --config run.json [overrides]

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "vacmech/cli.hpp"

namespace {

using vacmech::cli::Json;

int report(const vacmech::cli::ConfigError& e) {
    std::cerr << "configuration error:\n";
    for (const auto& v : e.violations()) std::cerr << "  - " << v << "\n";
    return vacmech::cli::kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
    namespace cli = vacmech::cli;

    CLI::App app{"Mechanical effects of vacuum and thermal field fluctuations in a two-mirror cavity"};
    std::string config_path;
    std::string out_path;
    std::string format;
    std::optional<double> rel_tol;
    std::optional<double> uv_cutoff;
    std::optional<double> length;

    app.add_option("--config", config_path, "JSON run configuration")->required();
    app.add_option("--out", out_path, "output file (default: standard output)");
    app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--rel-tol", rel_tol, "quadrature relative tolerance");
    app.add_option("--uv-cutoff", uv_cutoff, "UV cutoff (scatterer cutoff for mass, quadrature cutoff otherwise)");
    app.add_option("--q", length, "cavity length");
    app.require_subcommand(0, 1);
    app.fallthrough();
    for (const char* name : {"force", "energy", "spectrum", "mass", "sweep", "resonances"})
        app.add_subcommand(name, std::string("run the ") + name + " computation");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cli::kExitConfig;
    }

    Json doc;
    {
        std::ifstream in(config_path);
        if (!in) return report(cli::ConfigError({"cannot read config file " + config_path}));
        std::stringstream ss;
        ss << in.rdbuf();
        try {
            doc = Json::parse(ss.str());
        } catch (const Json::parse_error& e) {
            return report(cli::ConfigError({std::string("malformed JSON: ") + e.what()}));
        }
    }
    if (!doc.is_object()) return report(cli::ConfigError({"document must be an object"}));

    // Command-line values override single scalar fields of the document.
    const auto subs = app.get_subcommands();
    if (!subs.empty()) doc["command"] = subs.front()->get_name();
    if (rel_tol) doc["quadrature"]["rel_tol"] = *rel_tol;
    if (uv_cutoff) {
        if (doc.contains("scatterer") && doc["scatterer"].is_object())
            doc["scatterer"]["uv_cutoff"] = *uv_cutoff;
        else
            doc["quadrature"]["uv_cutoff"] = *uv_cutoff;
    }
    if (length) {
        if (!doc.contains("cavity") || !doc["cavity"].is_object())
            return report(cli::ConfigError({"--q needs a cavity block"}));
        doc["cavity"]["q"] = *length;
    }
    if (!format.empty()) doc["output"]["format"] = format;
    if (!out_path.empty()) doc["output"]["path"] = out_path;

    cli::RunConfig config;
    try {
        config = cli::parse_config(doc);
    } catch (const cli::ConfigError& e) {
        return report(e);
    }

    const cli::OutputRecord record = cli::run(config);
    try {
        cli::emit(record, config.output.format, config.output.path);
    } catch (const std::exception& e) {
        std::cerr << "output error: " << e.what() << "\n";
        return cli::kExitIo;
    }
    for (const auto& d : record.document["diagnostics"])
        if (d["severity"] == "error")
            std::cerr << "error [" << d["code"].get<std::string>() << "]: " << d["message"].get<std::string>() << "\n";
    return record.exit_code;
}
