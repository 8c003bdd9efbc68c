#pragma once

#include <stdexcept>

#include "tcsim/model.hpp"

namespace tcsim {

struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonUniqueSteadyStateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SteadyStateOptions {
    double tol = 1e-10;
    double shift = -1e-6;     // in units of kappa
    int krylov_dim = 30;      // Arnoldi subspace for the shift-and-invert solve
    int max_restarts = 200;
    double truncation_threshold = 1e-6;
};

struct SteadyStateResult {
    DensityMatrix rho;
    double residual = 0.0;               // ||L vec(rho)||_2 after normalization
    double spectral_gap_estimate = 0.0;  // |smallest nonzero Ritz value|
    double truncation_tail = 0.0;        // population of the top Fock level
};

/// Stationary state of L via shift-and-invert Arnoldi targeting the eigenvalue
/// nearest zero. The result is Hermitian-symmetrized and trace-normalized.
SteadyStateResult solve_steady(const Liouvillian& liouvillian, const SteadyStateOptions& options = {});

/// Dense verification oracle: solves the trace-constrained linear system
/// (L + t t^dag) x = t with t = vec(I) by direct factorization.
DensityMatrix dense_null_space(const Liouvillian& liouvillian, int dim_cap = 4096);

struct TruncationVerdict {
    bool ok = false;
    double tail = 0.0;
    int recommended_n_max = 0;  // doubling rule on failure
};

TruncationVerdict check_truncation(const SteadyStateResult& result, double threshold = 1e-6);

/// Total population of the given cavity Fock level.
double fock_level_population(const DensityMatrix& rho, int level);

double cavity_population(const DensityMatrix& rho);

}  // namespace tcsim
