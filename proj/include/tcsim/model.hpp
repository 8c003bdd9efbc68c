#pragma once

#include <Eigen/Dense>
#include <vector>

#include "tcsim/operators.hpp"
#include "tcsim/sparse.hpp"

namespace tcsim {

/// Physical parameters of the driven-dissipative Tavis-Cummings model.
/// All rates are in units of the cavity loss rate (kappa = 1 by convention).
struct SystemParams {
    int n_emitters = 1;
    double g = 0.1;
    double kappa = 1.0;
    double pump = 0.0;
    double dephasing = 0.0;
    std::vector<double> detunings;  // one per emitter; empty means all zero
    int n_max = 4;

    void validate() const;
    HilbertLayout layout() const { return HilbertLayout(n_max, n_emitters); }
    double detuning(int emitter) const {
        return detunings.empty() ? 0.0 : detunings.at(static_cast<std::size_t>(emitter));
    }
    /// Purcell-enhanced single-emitter relaxation rate 4 g^2 / kappa.
    double purcell_rate() const { return 4.0 * g * g / kappa; }
};

/// Vectorized density operator (column stacking: vec index = col * D + row).
struct DensityMatrix {
    std::vector<Complex> vec;
    HilbertLayout layout;

    Complex trace() const;
    void normalize();
    /// Replaces rho with (rho + rho^dagger) / 2.
    void hermitize();
    double hermiticity_defect() const;

    static DensityMatrix from_matrix(const Eigen::MatrixXcd& rho, const HilbertLayout& layout);
    Eigen::MatrixXcd matrix() const;
};

/// Sparse generator of the vectorized master equation, D^2 x D^2.
struct Liouvillian {
    SparseOperator matrix;
    HilbertLayout layout;
    SystemParams params;
};

std::vector<Complex> vec_stack(const Eigen::MatrixXcd& rho);
Eigen::MatrixXcd unvec(std::span<const Complex> v);

SparseOperator build_hamiltonian(const SystemParams& params, const HilbertLayout& layout);

/// Vectorized Lindblad dissipator for jump operator x at the given rate:
/// rate * [conj(x) (x) X - 1/2 I (x) (x^dag x) - 1/2 (x^dag x)^T (x) I].
SparseOperator build_dissipator(const SparseOperator& x, double rate);

Liouvillian build_liouvillian(const SystemParams& params);

/// Photons plus excited emitters of a product-basis state.
int excitation_number(int basis_index, const HilbertLayout& layout);

/// Compact basis for one weak-U(1) sector of the vectorized space. Every term
/// of the generator changes the excitation of the row and column indices of
/// rho by the same amount, so vec indices group by k = exc(row) - exc(col) and
/// the generator is block diagonal over these groups. The steady state lives
/// in k = 0 and vec(a rho_s) in k = -1; restricting to one block shrinks the
/// linear algebra by roughly the number of occupied excitation levels.
struct SectorBasis {
    int k = 0;
    int full_dim = 0;              // D^2
    std::vector<int> full_index;   // compact -> full vec index (ascending)
    std::vector<int> compact_index;  // full -> compact, -1 outside the sector

    int dim() const { return static_cast<int>(full_index.size()); }
};

SectorBasis sector_basis(const HilbertLayout& layout, int k);

/// Submatrix of a sector-preserving superoperator on the compact basis.
/// Throws if the operator couples the sector to the rest of the space.
SparseOperator restrict_to_sector(const SparseOperator& a, const SectorBasis& sector);

std::vector<Complex> restrict_vector(std::span<const Complex> full, const SectorBasis& sector);
std::vector<Complex> expand_vector(std::span<const Complex> compact, const SectorBasis& sector);

/// rho = |vacuum> <vacuum| (x) |g...g> <g...g|.
DensityMatrix ground_state(const HilbertLayout& layout);

/// Product basis projector |cavity_level, emitter bits> (emitter i excited iff bit i set).
DensityMatrix basis_projector(const HilbertLayout& layout, int cavity_level, unsigned emitter_bits);

}  // namespace tcsim
