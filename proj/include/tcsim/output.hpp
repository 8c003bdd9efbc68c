#pragma once

#include <iosfwd>

#include "tcsim/config.hpp"

namespace tcsim {

inline constexpr const char* kVersion = "0.1.0";

/// Writes one row per sweep point with the stable column order:
/// axis value, n, Z, nJ, g2, cf, reference, fwhm, residual, truncation_tail, status.
/// Floating-point fields print at 12 significant digits; absent values as nan.
void write_results_csv(const std::filesystem::path& path, const SweepSpec& spec,
                       const std::vector<SweepPoint>& points);

void write_spectrum_csv(const std::filesystem::path& path, const SpectrumTrace& trace);

/// JSON manifest recording the resolved configuration, tolerances, and
/// software version; a manifest can be fed back as --config to reproduce a run.
void write_manifest(const std::filesystem::path& path, const RunConfig& config,
                    const std::vector<LabeledSweep>& sweeps);

/// Rebuilds a RunConfig from a manifest written by write_manifest.
RunConfig load_manifest(const std::filesystem::path& path);

/// Minimal line-plot SVG of selected columns against the sweep axis.
void write_sweep_svg(const std::filesystem::path& path, const SweepSpec& spec,
                     const std::vector<SweepPoint>& points);

/// Executes a validated config end to end. Returns the number of sweep points
/// that failed (per-point failures do not abort the run).
int run(const RunConfig& config, std::ostream& log);

}  // namespace tcsim
