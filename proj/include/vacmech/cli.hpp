#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "vacmech/mirrors.hpp"
#include "vacmech/observables.hpp"
#include "vacmech/quadrature.hpp"
#include "vacmech/scatterer.hpp"

namespace vacmech::cli {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1";
inline constexpr const char* kToolVersion = "1.0.0";

enum class Command { Force, Energy, Spectrum, Mass, Sweep, Resonances };
enum class Format { Json, Csv };
enum class SweepVariable { Q, T, OmegaC };

[[nodiscard]] const char* to_string(Command c);
[[nodiscard]] std::optional<Command> parse_command(const std::string& s);
[[nodiscard]] const char* to_string(Format f);
[[nodiscard]] const char* to_string(SweepVariable v);

struct CavityBlock {
    MirrorModel m1 = MirrorModel::point(1.0);
    MirrorModel m2 = MirrorModel::point(1.0);
    double q = 1.0;
};

/// Frequency grid for spectrum and mass. Unset bounds fall back to the
/// command's default range.
struct GridBlock {
    std::optional<double> omega_min;
    std::optional<double> omega_max;
    std::size_t points = 200;
    bool logarithmic = true;
};

struct SweepBlock {
    Command command = Command::Energy;
    SweepVariable variable = SweepVariable::Q;
    std::vector<double> values;
};

struct OutputBlock {
    Format format = Format::Json;
    std::string path;  ///< empty means standard output
};

struct RunConfig {
    Command command = Command::Force;
    std::optional<CavityBlock> cavity;
    std::optional<PointScattererSpec> scatterer;
    ThermalState thermal;
    QuadratureSpec quadrature;
    GridBlock grid;
    std::optional<SweepBlock> sweep;
    std::size_t n_max = 10;
    OutputBlock output;
};

/// Every violation found in a configuration document, not just the first.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> violations);
    [[nodiscard]] const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    std::vector<std::string> violations_;
};

/// Parses and validates a configuration document. Throws ConfigError.
[[nodiscard]] RunConfig parse_config(const Json& doc);
[[nodiscard]] RunConfig parse_config_text(const std::string& text);
[[nodiscard]] RunConfig parse_config_file(const std::string& path);

/// Re-checks the cross-field invariants after command-line overrides.
void validate(const RunConfig& config);

/// Configuration echo; parse_config(to_json(c)) reproduces c.
[[nodiscard]] Json to_json(const RunConfig& config);
[[nodiscard]] Json mirror_to_json(const MirrorModel& m);

/// Flat table written when the output format is CSV; cells are preformatted.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// 17 significant digits in scientific notation; NaN becomes an empty cell.
[[nodiscard]] std::string csv_cell(double x);

struct OutputRecord {
    Json document;  ///< schema_version, inputs, results, diagnostics, provenance
    Table table;
    int exit_code = 0;
};

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// Dispatches the configured computation. Numerical failures become Error
/// diagnostics with exit code 3; Warn diagnostics never fail a run.
[[nodiscard]] OutputRecord run(const RunConfig& config);

/// Serializes the record. CSV numbers use 17 significant digits.
[[nodiscard]] std::string render(const OutputRecord& record, Format format);

/// Writes the record to `path` (standard output when empty). Throws
/// std::runtime_error naming the path on I/O failure.
void emit(const OutputRecord& record, Format format, const std::string& path);

/// {value, error_estimate, uv_cutoff} for one observable.
[[nodiscard]] Json observable_json(const IntegralResult& r);
[[nodiscard]] Json observable_json(double value, double error_estimate, std::optional<double> uv_cutoff);
[[nodiscard]] Json diagnostics_json(const Diagnostics& diags, const std::string& source);

}  // namespace vacmech::cli
