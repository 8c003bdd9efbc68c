#pragma once

#include <Eigen/Dense>
#include <functional>

#include "tcsim/model.hpp"

namespace tcsim {

/// Orthonormal Krylov factorization V^dag A V = H_small on the retained
/// subspace, built by Arnoldi with modified Gram-Schmidt.
struct KrylovBasis {
    Eigen::MatrixXcd v;        // n x m orthonormal columns
    Eigen::MatrixXcd h_small;  // m x m upper Hessenberg
    int m = 0;
    double h_next = 0.0;       // |H(m+1, m)| coupling to the discarded direction
    bool breakdown = false;    // subspace became invariant early
};

struct PropagatorOptions {
    int krylov_dim = 20;
    double step_tol = 1e-9;  // per-step Krylov residual surrogate
};

KrylovBasis arnoldi(const SparseOperator& a, std::span<const Complex> v0, int m);
KrylovBasis arnoldi(const Liouvillian& l, std::span<const Complex> v0, int m);

/// Dense matrix exponential by Pade approximation with scaling and squaring.
/// Used on the small Hessenberg block when its eigendecomposition is too
/// ill-conditioned; also usable standalone.
Eigen::MatrixXcd expm_dense(const Eigen::MatrixXcd& a);

/// Approximates e^{A dt} v by Krylov projection: V [U e^{D dt} U^{-1}] [V^dag v].
/// Steps whose error surrogate exceeds the tolerance are split in halves.
std::vector<Complex> expm_apply(const SparseOperator& a, std::span<const Complex> v, double dt,
                                const PropagatorOptions& options = {});
std::vector<Complex> expm_apply(const Liouvillian& l, std::span<const Complex> v, double dt,
                                const PropagatorOptions& options = {});

std::vector<DensityMatrix> propagate_density(const DensityMatrix& rho, const Liouvillian& l,
                                             std::span<const double> t_grid,
                                             const PropagatorOptions& options = {});

/// Evaluates f^T e^{A t} v0 on an ascending grid of times. Adaptive macro
/// steps share one Krylov basis across all sample times they cover, so the
/// per-sample cost is O(m^2) instead of a fresh factorization.
std::vector<Complex> sample_linear_functional(const SparseOperator& a, std::span<const Complex> v0,
                                              std::span<const Complex> f,
                                              std::span<const double> t_grid,
                                              const PropagatorOptions& options = {});

}  // namespace tcsim
