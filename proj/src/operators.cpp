#include "tcsim/operators.hpp"

#include <cmath>
#include <stdexcept>

namespace tcsim {

HilbertLayout::HilbertLayout(int n_max_, int n_emitters_) : n_max(n_max_), n_emitters(n_emitters_) {
    if (n_max < 0) throw std::invalid_argument("HilbertLayout: n_max must be >= 0");
    if (n_emitters < 1) throw std::invalid_argument("HilbertLayout: n_emitters must be >= 1");
    if (n_emitters > 20) throw std::invalid_argument("HilbertLayout: n_emitters too large");
    dim = (n_max + 1) << n_emitters;
}

SparseOperator fock_annihilation(int n_levels) {
    if (n_levels < 1) throw std::invalid_argument("fock_annihilation: n_levels must be >= 1");
    std::vector<Triplet> t;
    for (int m = 1; m < n_levels; ++m) {
        t.push_back({m - 1, m, Complex(std::sqrt(static_cast<double>(m)), 0.0)});
    }
    return SparseOperator::from_triplets(n_levels, n_levels, std::move(t));
}

SparseOperator two_level_lowering() {
    return SparseOperator::from_triplets(2, 2, {{0, 1, Complex(1.0, 0.0)}});
}

SparseOperator embed(const SparseOperator& op, SiteIndex site, const HilbertLayout& layout) {
    const int local_dim = site.is_cavity() ? layout.cavity_dim() : 2;
    if (!site.is_cavity() && site.value >= layout.n_emitters) {
        throw std::invalid_argument("embed: emitter index out of range");
    }
    if (op.rows() != local_dim || op.cols() != local_dim) {
        throw std::invalid_argument("embed: operator does not match the site's local dimension");
    }
    // Factor order: cavity, emitter 0, ..., emitter N-1.
    const int site_pos = site.is_cavity() ? 0 : site.value + 1;
    int left_dim = 1;
    int right_dim = 1;
    for (int p = 0; p < site_pos; ++p) left_dim *= (p == 0 ? layout.cavity_dim() : 2);
    for (int p = site_pos + 1; p <= layout.n_emitters; ++p) right_dim *= (p == 0 ? layout.cavity_dim() : 2);
    SparseOperator result = op;
    if (left_dim > 1) result = kron(SparseOperator::identity(left_dim), result);
    if (right_dim > 1) result = kron(result, SparseOperator::identity(right_dim));
    return result;
}

SparseOperator cavity_annihilation(const HilbertLayout& layout) {
    return embed(fock_annihilation(layout.cavity_dim()), SiteIndex::cavity(), layout);
}

SparseOperator collective_lowering(const HilbertLayout& layout) {
    SparseOperator j = embed(two_level_lowering(), SiteIndex::emitter(0), layout);
    for (int i = 1; i < layout.n_emitters; ++i) {
        j = j + embed(two_level_lowering(), SiteIndex::emitter(i), layout);
    }
    return j;
}

}  // namespace tcsim
