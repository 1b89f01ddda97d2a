#pragma once

// Batch front-end: JSON job configs in, JSON reports (and optional orbit
// CSV tables) out.

#include <optional>
#include <string>

#include "smld/io.hpp"

namespace smld::cli {

enum class Mode { MatPow, Linearize, Orbit, ReturnSet, RecSeqZeros, Trichotomy };
std::string to_string(Mode m);

struct JobConfig {
    Mode mode = Mode::ReturnSet;
    std::optional<ProductSystem> system;
    std::optional<Vector> a;
    std::optional<Variety> variety;
    std::optional<Matrix> g;         // matpow
    double x = 0.0;                  // matpow exponent
    std::optional<Germ> germ;        // linearize
    bool rational = false;           // linearize: exact coefficients
    std::optional<Recurrence> recurrence;
    long n_max = 200;
    std::optional<double> x_max;
    double tol = 1e-10;
    int samples_per_unit = 4;        // orbit table density
    unsigned long seed = 0;
};

// ParseError for malformed JSON, ValidationError (with the JSON path) for
// schema violations.
JobConfig parse_config(const std::string& text);

struct RunOptions {
    std::string orbit_out;  // CSV path; empty for none
};

struct RunResult {
    Json report;
    int exit_code = 0;
};

// Contract failures give exit 4, invariant violations exit 5; both still
// produce an {"error": ...} report.
RunResult run(const JobConfig& config, const RunOptions& options = {});

int exit_code_for(const std::exception& e);

} // namespace smld::cli
