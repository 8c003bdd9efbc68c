#include "tcsim/cooperativity.hpp"

#include <omp.h>

#include <cmath>
#include <stdexcept>

namespace tcsim {

CooperativityPoint cooperative_fraction(const SystemParams& params, const SteadyStateOptions& options) {
    params.validate();
    CooperativityPoint point;

    try {
        const Liouvillian shared = build_liouvillian(params);
        const SteadyStateResult result = solve_steady(shared, options);
        point.record = compute_observables(result.rho, params);
        point.shared_n = point.record.n;
        point.residual = result.residual;
        point.truncation_tail = result.truncation_tail;
    } catch (const std::exception& e) {
        throw std::runtime_error("cooperative_fraction: shared system failed: " + std::string(e.what()));
    }

    // Reference: each emitter in its own cavity with identical g, k, P, gamma
    // and its own detuning; same photon truncation for comparability.
    for (int i = 0; i < params.n_emitters; ++i) {
        SystemParams single = params;
        single.n_emitters = 1;
        single.detunings = {params.detuning(i)};
        try {
            const Liouvillian l = build_liouvillian(single);
            const SteadyStateResult result = solve_steady(l, options);
            point.independent_n.push_back(cavity_population(result.rho));
        } catch (const std::exception& e) {
            throw std::runtime_error("cooperative_fraction: single-emitter system " +
                                     std::to_string(i) + " failed: " + std::string(e.what()));
        }
    }

    if (point.shared_n >= 1e-8) {
        double sum = 0.0;
        for (double n : point.independent_n) sum += n;
        point.cf = (point.shared_n - sum) / point.shared_n;
    }
    point.reference = reference_measure(point.record);
    return point;
}

std::optional<double> reference_measure(const ObservableRecord& record) {
    if (record.n_j <= 0.0) return std::nullopt;
    return (record.n_j - record.z) / record.n_j;
}

std::string to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::pump: return "pump";
        case SweepAxis::coupling: return "coupling";
        case SweepAxis::detuning_symmetric: return "detuning_symmetric";
        case SweepAxis::dephasing: return "dephasing";
        case SweepAxis::n_emitters: return "n_emitters";
    }
    throw std::logic_error("to_string: unknown sweep axis");
}

SweepAxis sweep_axis_from_string(const std::string& name) {
    if (name == "pump") return SweepAxis::pump;
    if (name == "coupling") return SweepAxis::coupling;
    if (name == "detuning_symmetric") return SweepAxis::detuning_symmetric;
    if (name == "dephasing") return SweepAxis::dephasing;
    if (name == "n_emitters") return SweepAxis::n_emitters;
    throw std::invalid_argument("unknown sweep axis: " + name);
}

SystemParams SweepSpec::params_at(double value) const {
    SystemParams p = base;
    switch (axis) {
        case SweepAxis::pump:
            p.pump = value;
            break;
        case SweepAxis::coupling:
            p.g = value;
            break;
        case SweepAxis::detuning_symmetric: {
            // Emitters split evenly around the cavity: +value, -value, ...
            p.detunings.assign(static_cast<std::size_t>(p.n_emitters), 0.0);
            for (int i = 0; i < p.n_emitters; ++i) {
                p.detunings[static_cast<std::size_t>(i)] = (i % 2 == 0) ? value : -value;
            }
            break;
        }
        case SweepAxis::dephasing:
            p.dephasing = value;
            break;
        case SweepAxis::n_emitters: {
            const int n = static_cast<int>(std::lround(value));
            p.n_emitters = n;
            if (!p.detunings.empty()) p.detunings.assign(static_cast<std::size_t>(n), 0.0);
            break;
        }
    }
    return p;
}

void SweepSpec::validate() const {
    if (grid.empty()) throw std::invalid_argument("SweepSpec: grid must be nonempty");
    const bool ascending = grid.size() < 2 || grid[1] > grid[0];
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (ascending ? grid[i] <= grid[i - 1] : grid[i] >= grid[i - 1]) {
            throw std::invalid_argument("SweepSpec: grid must be strictly monotone");
        }
    }
    for (double v : grid) params_at(v).validate();
}

std::vector<SweepPoint> run_sweep(const SweepSpec& spec, const SweepRunOptions& options) {
    spec.validate();
    const auto count = static_cast<int>(spec.grid.size());
    std::vector<SweepPoint> points(static_cast<std::size_t>(count));

    const int workers = options.workers > 0 ? options.workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
    for (int i = 0; i < count; ++i) {
        SweepPoint& point = points[static_cast<std::size_t>(i)];
        point.axis_value = spec.grid[static_cast<std::size_t>(i)];
        try {
            const SystemParams params = spec.params_at(point.axis_value);
            if (spec.outputs.cf) {
                point.coop = cooperative_fraction(params, options.steady);
            }
            if (spec.outputs.spectrum && i % std::max(1, spec.outputs.spectrum_every) == 0) {
                const Liouvillian l = build_liouvillian(params);
                const SteadyStateResult result = solve_steady(l, options.steady);
                if (!spec.outputs.cf) {
                    CooperativityPoint coop;
                    coop.record = compute_observables(result.rho, params);
                    coop.shared_n = coop.record.n;
                    coop.reference = reference_measure(coop.record);
                    coop.residual = result.residual;
                    coop.truncation_tail = result.truncation_tail;
                    point.coop = std::move(coop);
                }
                SpectrumComputeOptions spectrum_options = options.spectrum;
                spectrum_options.stationarity_tol =
                    std::max(spectrum_options.stationarity_tol, 100.0 * result.residual);
                point.spectrum = emission_spectrum(result.rho, l, spectrum_options);
            } else if (!spec.outputs.cf && spec.outputs.observables) {
                const Liouvillian l = build_liouvillian(params);
                const SteadyStateResult result = solve_steady(l, options.steady);
                CooperativityPoint coop;
                coop.record = compute_observables(result.rho, params);
                coop.shared_n = coop.record.n;
                coop.reference = reference_measure(coop.record);
                coop.residual = result.residual;
                coop.truncation_tail = result.truncation_tail;
                point.coop = std::move(coop);
            }
        } catch (const std::exception& e) {
            point.status = e.what();
        }
        if (options.progress) {
#pragma omp critical(tcsim_sweep_progress)
            options.progress(static_cast<std::size_t>(i), point);
        }
    }
    return points;
}

std::vector<double> log_grid(double lo, double hi, int points) {
    if (lo <= 0.0 || hi <= lo || points < 2) throw std::invalid_argument("log_grid: bad range");
    std::vector<double> g(static_cast<std::size_t>(points));
    const double step = std::log(hi / lo) / (points - 1);
    for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = lo * std::exp(step * i);
    g.back() = hi;
    return g;
}

std::vector<double> linear_grid(double lo, double hi, int points) {
    if (hi <= lo || points < 2) throw std::invalid_argument("linear_grid: bad range");
    std::vector<double> g(static_cast<std::size_t>(points));
    const double step = (hi - lo) / (points - 1);
    for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = lo + step * i;
    g.back() = hi;
    return g;
}

}  // namespace tcsim
