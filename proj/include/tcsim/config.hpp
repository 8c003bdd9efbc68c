#pragma once

#include <filesystem>
#include <string>

#include "tcsim/cooperativity.hpp"

namespace tcsim {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A fully validated run description: either a named preset or one explicit
/// sweep, never both.
struct RunConfig {
    std::string preset;                       // empty when an explicit spec is given
    std::optional<SweepSpec> explicit_spec;   // engaged when preset is empty
    std::string out_dir = "out";
    int workers = 0;                          // 0 = available parallelism
    bool svg = false;
    std::optional<int> n_max_override;
    std::optional<double> tol_override;
};

/// Parses the flat key-value + section config format. Unknown keys are
/// rejected by name; parse errors carry the line number.
RunConfig parse_config(const std::string& text);
RunConfig parse_config_file(const std::filesystem::path& path);

/// One sweep of a preset family (e.g. fig3 ships one sweep per coupling).
struct LabeledSweep {
    std::string label;  // empty for single-sweep presets
    SweepSpec spec;
};

std::vector<LabeledSweep> preset_sweeps(const std::string& name);
std::vector<std::string> preset_names();

/// Resolves a RunConfig to the concrete sweeps it will execute,
/// applying truncation overrides.
std::vector<LabeledSweep> resolve_sweeps(const RunConfig& config);

}  // namespace tcsim
