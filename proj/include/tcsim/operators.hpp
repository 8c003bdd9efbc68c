#pragma once

#include "tcsim/sparse.hpp"

namespace tcsim {

/// Fixed tensor-product layout of the truncated Hilbert space:
/// cavity factor first (n_max + 1 Fock levels), then emitter 1 ... emitter N.
struct HilbertLayout {
    int n_max = 0;
    int n_emitters = 0;
    int dim = 0;

    HilbertLayout() = default;
    HilbertLayout(int n_max_, int n_emitters_);

    int cavity_dim() const { return n_max + 1; }

    /// Cavity Fock index of a product-basis state.
    int photon_number(int basis_index) const { return basis_index / (dim / cavity_dim()); }
};

/// Identifies one tensor factor: the cavity or a zero-based emitter index.
struct SiteIndex {
    int value;  // -1 = cavity, 0..N-1 = emitter

    static SiteIndex cavity() { return {-1}; }
    static SiteIndex emitter(int i) { return {i}; }
    bool is_cavity() const { return value < 0; }
};

SparseOperator fock_annihilation(int n_levels);

/// 2x2 sigma^- in the basis (0 = ground, 1 = excited).
SparseOperator two_level_lowering();

/// Lifts a local operator to the full space: identity on every other factor.
SparseOperator embed(const SparseOperator& op, SiteIndex site, const HilbertLayout& layout);

SparseOperator cavity_annihilation(const HilbertLayout& layout);

/// J = sum_i sigma_i^- in the full space.
SparseOperator collective_lowering(const HilbertLayout& layout);

}  // namespace tcsim
