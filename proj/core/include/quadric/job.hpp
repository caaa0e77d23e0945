// job.hpp — configuration ingestion, preset resolution, command dispatch,
// and CSV emission for the CLI. The config document is JSON with top-level
// keys `quadric`, `command`, `q`, `K`, `points` | `grid`, `quadrature`,
// `output` (plus per-command extras documented in the README). Complex
// numbers are [re, im] pairs.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "quadric/green.hpp"
#include "quadric/levi.hpp"

namespace quadric {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Command { SPECTRUM, CLASSIFY, GAMMA, SZEGO, GREEN, HEAT, VERIFY };
const char* to_string(Command c);

struct PointSpec {
    std::vector<cx> z;
    std::vector<double> t;
    bool operator==(const PointSpec&) const = default;
};

struct JobConfig {
    std::optional<std::string> preset;       // exactly one of preset / inline matrices
    std::optional<QuadricForm> inline_form;
    Command command = Command::CLASSIFY;
    int q = 0;
    MultiIndex K;
    std::vector<PointSpec> points;
    std::vector<std::vector<double>> directions;  // spectrum command
    std::vector<double> lambda;                   // heat command
    std::vector<double> s_values;                 // heat command
    int sampler_density = 2048;
    std::uint64_t seed = 0;
    int threads = 1;
    QuadratureSpec quadrature;
    std::string output_path;  // empty: stdout
    std::string suite = "all";

    QuadricForm quadric() const;  // resolves the preset or returns the inline form
    bool operator==(const JobConfig&) const = default;
};

// Parses and validates; throws ConfigError with a human-readable reason
// (including the max asymmetry for non-Hermitian inline matrices).
JobConfig parse_config(const std::string& text);

// Canonical serialization; parse(emit(c)) == c.
std::string emit_config(const JobConfig& cfg);

// Runs the job, writing CSV to `out`. Returns the process exit status:
// 0 success, 3 numerical-tolerance failure (output still written).
// Config errors throw ConfigError (exit 2); evaluating at the kernel
// singularity throws std::domain_error (exit 4).
int run_job(const JobConfig& cfg, std::ostream& out);

// As above but honoring cfg.output_path (stdout when empty).
int run_job(const JobConfig& cfg);

}  // namespace quadric
