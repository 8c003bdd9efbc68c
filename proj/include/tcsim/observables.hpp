#pragma once

#include <optional>
#include <utility>

#include "tcsim/propagator.hpp"

namespace tcsim {

struct HorizonError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Scalar steady-state observables at one parameter point.
struct ObservableRecord {
    double n = 0.0;                // cavity population <a^dag a>
    double z = 0.0;                // total inversion sum_i <sigma_i^dag sigma_i>
    double n_j = 0.0;              // collective dipole <J^dag J>
    std::optional<double> g2;      // absent when n is below the smallness threshold
    SystemParams params;
};

/// tr(op rho). For Hermitian op the imaginary part stays below 1e-10.
Complex expectation(const DensityMatrix& rho, const SparseOperator& op);

std::optional<double> g2_zero(const DensityMatrix& rho);

ObservableRecord compute_observables(const DensityMatrix& rho, const SystemParams& params);

struct CorrelationTrace {
    std::vector<double> t;
    std::vector<Complex> g;  // G(t) = <a^dag(t) a(0)>
};

/// G(t) = tr{a^dag e^{L t} a rho_s} on the given grid via quantum regression.
CorrelationTrace first_order_correlation(const DensityMatrix& rho_s, const Liouvillian& l,
                                         std::span<const double> t_grid,
                                         const PropagatorOptions& options = {},
                                         double stationarity_tol = 1e-6);

struct SpectrumTrace {
    std::vector<double> omega;  // relative to the cavity, units of kappa
    std::vector<double> s;
    CorrelationTrace correlation;
    double t_max = 0.0;
    double fwhm = 0.0;
    std::vector<std::pair<double, double>> peaks;  // (position, height), tallest first
};

/// Two-sided transform of G with the Hermitian extension G(-t) = conj(G(t)).
/// Requires a uniform grid and a decayed tail |G(t_max)| <= 1e-4 |G(0)|.
SpectrumTrace spectrum(const CorrelationTrace& correlation);

struct SpectrumComputeOptions {
    PropagatorOptions propagator;
    double decay_target = 1e-4;   // tail-to-peak ratio ending the horizon search
    int max_doublings = 14;
    double stationarity_tol = 1e-6;
    double dt = 0.0;              // 0 = choose from the model's frequency span
    double initial_t_max = 0.0;   // 0 = choose automatically
};

/// Full pipeline: correlation with automatic horizon doubling, then transform.
SpectrumTrace emission_spectrum(const DensityMatrix& rho_s, const Liouvillian& l,
                                const SpectrumComputeOptions& options = {});

}  // namespace tcsim
