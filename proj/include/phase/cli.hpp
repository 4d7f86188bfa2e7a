// cli.hpp
// Config-driven front end: parse a sectioned key/value config, evaluate a
// phase functional over a (solid angle x temperature x representation) grid
// on a worker pool, and emit deterministic CSV or JSON tables. Also hosts
// the analytic-vs-numeric verification battery and the bundled presets.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "phase/models.hpp"
#include "phase/states.hpp"

namespace phase {

enum class RepresentationSelect { PURIFIED, THERMAL_VACUUM, BOTH };
enum class PhaseSelect { THERMAL_BERRY, GENERALIZED_BERRY, INTERFEROMETRIC, DIAGNOSTICS };
enum class OutputFormat { CSV, JSON };

struct LoopSpec {
    LoopKind kind = LoopKind::Latitude;
    double theta0 = 0.0;   // latitude opening angle; 0 means "set by omega grid"
    double phi0 = 0.0;     // meridian plane
    int segments = 512;
    int orientation = 1;
};

// A run is a grid of independent jobs. Exactly one of the two temperature
// axes is populated; both columns are always emitted (kT/R = 1/(beta R)).
// An omega grid re-aims the latitude opening angle per value.
struct RunConfig {
    std::string model = "two-level-s2";
    LoopSpec loop;
    std::vector<double> betas;   // dimensionless beta*R, strictly positive
    std::vector<double> omegas;  // solid angle targets; empty means loop spec as-is
    RepresentationSelect representation = RepresentationSelect::THERMAL_VACUUM;
    PhaseSelect phase = PhaseSelect::THERMAL_BERRY;
    OutputFormat format = OutputFormat::CSV;
    std::string output_path;     // empty writes to stdout
};

const std::vector<std::string>& known_models();

// Parses the sectioned key = value format (see README for the schema).
// Unknown sections, keys, or names are rejected. Throws ConfigError.
RunConfig parse_config(std::istream& in);
RunConfig parse_config_file(const std::string& path);

struct SweepRow {
    double beta = 0.0;
    double kT_over_R = 0.0;
    double omega = 0.0;
    AncillaConvention representation = AncillaConvention::PURIFIED;
    double phase_mod2pi = 0.0;
    double phase_raw = 0.0;
    double residual_max = 0.0;
    bool converged = false;
    bool undefined = false;  // phase columns carry the marker instead of values

    bool operator==(const SweepRow&) const = default;
};

// Evaluates the grid concurrently (worker count capped by PHASE_THREADS)
// and returns rows sorted by (beta, omega, representation). Jobs whose
// phase is genuinely undefined yield marker rows; any other evaluation
// failure surfaces as NumericError.
std::vector<SweepRow> run_sweep(const RunConfig& config);

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows);
void write_json(std::ostream& out, const std::vector<SweepRow>& rows);

// Inverse of write_json, for round-trip checks and downstream tooling.
std::vector<SweepRow> rows_from_json_text(const std::string& text);

// Bundled ready-to-run configs: "fig1", "example51", "null-theorem".
// Returns nullptr for unknown names.
const char* preset_config(const std::string& name);

// Subcommand drivers. Exit codes: 0 success, 1 verification failure or
// undefined phases without --allow-undefined, 2 config error, 3 numeric
// failure.
int run_command(const std::string& config_path, bool allow_undefined, std::ostream& err);
int verify_command(const std::string& suite, bool allow_undefined, int segments,
                   std::ostream& out);
int presets_command(const std::string& name, std::ostream& out, std::ostream& err);

} // namespace phase
