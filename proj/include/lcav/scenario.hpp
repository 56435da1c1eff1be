#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "lcav/dressed.hpp"
#include "lcav/evolve.hpp"
#include "lcav/fock.hpp"
#include "lcav/model.hpp"
#include "lcav/types.hpp"

namespace lcav {

struct ScenarioConfig {
    ModelParams model;
    AtomInit atom;
    FieldSpec left;
    FieldSpec right;
    Frame frame = Frame::interaction;
    double tmax = 50.0;   // in units of 1/lambda_L
    int steps = 2000;     // grid points including t = 0
    double tail_eps = 1e-12;
    bool oracle_check = false;
    int oracle_nmax = 3;  // per-mode cutoff of the brute-force cross-check
    ObservableSelection select;
    std::string out_path; // empty writes to stdout
};

// INI text: sections [model], [atom], [left], [right], [run] with keys named
// after the corresponding struct fields. Unknown or duplicate keys, malformed
// lines, and values of the wrong shape raise config_error with a line number.
ScenarioConfig parse_config(std::istream& in);
ScenarioConfig parse_config_file(const std::string& path);

// Canonical INI rendering; parse_config(serialize_config(c)) reproduces c.
std::string serialize_config(const ScenarioConfig& config);

// Figure-reproduction presets. Ids are listed in registration order.
std::vector<std::string> preset_ids();
ScenarioConfig preset(const std::string& id); // unknown id raises config_error

struct ScenarioResult {
    std::vector<double> grid;
    std::vector<ObservableRow> rows;
    double oracle_deviation = -1.0; // -1 when the cross-check is off
};

// Validates, builds the initial state, optionally runs the reduced-cutoff
// brute-force cross-check (deviation above 1e-9 raises consistency_error),
// then sweeps the grid.
ScenarioResult run_scenario(const ScenarioConfig& config);

// Fixed column set, shortest round-trip decimals, '\n' line endings; output
// depends on nothing but the rows.
void write_csv(std::ostream& out, const std::vector<ObservableRow>& rows);

struct SelfTestOptions {
    enum class Level { fast, full };
    Level level = Level::fast;
    // Test hook: applied to each eigensystem before the structural checks so
    // a negative control can prove the checks reject corrupted bases.
    std::function<void(SubspaceEigensystem&)> corrupt;
};

// Runs the invariant suite (plus brute-force equivalence at the full level),
// writing one line per check; returns false when anything failed.
bool self_test(const SelfTestOptions& options, std::ostream& out);

} // namespace lcav
