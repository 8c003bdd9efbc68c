#pragma once

#include <functional>
#include <string>

#include "tcsim/observables.hpp"
#include "tcsim/steady_state.hpp"

namespace tcsim {

/// One evaluation of the cooperative fraction: the shared-cavity system
/// against the summed outputs of per-emitter single-cavity references.
struct CooperativityPoint {
    std::optional<double> cf;         // absent when shared_n is negligible
    double shared_n = 0.0;            // n(N, {delta_i}, gamma)
    std::vector<double> independent_n;
    std::optional<double> reference;  // (n_J - Z) / n_J
    ObservableRecord record;          // shared-system observables
    double residual = 0.0;
    double truncation_tail = 0.0;
};

CooperativityPoint cooperative_fraction(const SystemParams& params,
                                        const SteadyStateOptions& options = {});

std::optional<double> reference_measure(const ObservableRecord& record);

enum class SweepAxis { pump, coupling, detuning_symmetric, dephasing, n_emitters };

std::string to_string(SweepAxis axis);
SweepAxis sweep_axis_from_string(const std::string& name);

struct SweepOutputs {
    bool observables = true;
    bool cf = true;
    bool spectrum = false;
    int spectrum_every = 1;  // compute a spectrum at every k-th grid point
};

struct SweepSpec {
    SystemParams base;
    SweepAxis axis = SweepAxis::pump;
    std::vector<double> grid;  // strictly monotone, nonempty
    SweepOutputs outputs;

    SystemParams params_at(double value) const;
    void validate() const;
};

struct SweepPoint {
    double axis_value = 0.0;
    std::optional<CooperativityPoint> coop;
    std::optional<SpectrumTrace> spectrum;
    std::string status = "ok";  // "ok" or the failure message
};

struct SweepRunOptions {
    SteadyStateOptions steady;
    SpectrumComputeOptions spectrum;
    int workers = 0;  // 0 = available parallelism
    std::function<void(std::size_t index, const SweepPoint&)> progress;
};

/// Runs every grid point (concurrently); failed points carry their error in
/// status rather than aborting the sweep. Output order matches the grid.
std::vector<SweepPoint> run_sweep(const SweepSpec& spec, const SweepRunOptions& options = {});

std::vector<double> log_grid(double lo, double hi, int points);
std::vector<double> linear_grid(double lo, double hi, int points);

}  // namespace tcsim
