#include "tcsim/model.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace tcsim {

void SystemParams::validate() const {
    if (n_emitters < 1) throw std::invalid_argument("SystemParams: n_emitters must be >= 1");
    if (kappa <= 0.0) throw std::invalid_argument("SystemParams: kappa must be positive");
    if (g < 0.0) throw std::invalid_argument("SystemParams: g must be >= 0");
    if (pump < 0.0) throw std::invalid_argument("SystemParams: pump must be >= 0");
    if (dephasing < 0.0) throw std::invalid_argument("SystemParams: dephasing must be >= 0");
    if (n_max < 1) throw std::invalid_argument("SystemParams: n_max must be >= 1");
    if (!detunings.empty() && static_cast<int>(detunings.size()) != n_emitters) {
        throw std::invalid_argument("SystemParams: detunings must have one entry per emitter");
    }
}

Complex DensityMatrix::trace() const {
    const int d = layout.dim;
    Complex t(0.0, 0.0);
    for (int i = 0; i < d; ++i) t += vec[static_cast<std::size_t>(i) * d + i];
    return t;
}

void DensityMatrix::normalize() {
    const Complex t = trace();
    if (std::abs(t) == 0.0) throw std::runtime_error("DensityMatrix: zero trace, cannot normalize");
    for (auto& v : vec) v /= t;
}

void DensityMatrix::hermitize() {
    const int d = layout.dim;
    for (int c = 0; c < d; ++c) {
        for (int r = 0; r <= c; ++r) {
            const std::size_t rc = static_cast<std::size_t>(c) * d + r;
            const std::size_t cr = static_cast<std::size_t>(r) * d + c;
            const Complex avg = 0.5 * (vec[rc] + std::conj(vec[cr]));
            vec[rc] = avg;
            vec[cr] = std::conj(avg);
        }
    }
}

double DensityMatrix::hermiticity_defect() const {
    const int d = layout.dim;
    double worst = 0.0;
    for (int c = 0; c < d; ++c) {
        for (int r = 0; r <= c; ++r) {
            const Complex a = vec[static_cast<std::size_t>(c) * d + r];
            const Complex b = vec[static_cast<std::size_t>(r) * d + c];
            worst = std::max(worst, std::abs(a - std::conj(b)));
        }
    }
    return worst;
}

DensityMatrix DensityMatrix::from_matrix(const Eigen::MatrixXcd& rho, const HilbertLayout& layout) {
    if (rho.rows() != layout.dim || rho.cols() != layout.dim) {
        throw std::invalid_argument("DensityMatrix::from_matrix: dimension mismatch");
    }
    return DensityMatrix{vec_stack(rho), layout};
}

Eigen::MatrixXcd DensityMatrix::matrix() const { return unvec(vec); }

std::vector<Complex> vec_stack(const Eigen::MatrixXcd& rho) {
    std::vector<Complex> v(static_cast<std::size_t>(rho.size()));
    for (Eigen::Index c = 0; c < rho.cols(); ++c) {
        for (Eigen::Index r = 0; r < rho.rows(); ++r) {
            v[static_cast<std::size_t>(c * rho.rows() + r)] = rho(r, c);
        }
    }
    return v;
}

Eigen::MatrixXcd unvec(std::span<const Complex> v) {
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
    if (static_cast<std::size_t>(d) * static_cast<std::size_t>(d) != v.size()) {
        throw std::invalid_argument("unvec: length is not a perfect square");
    }
    Eigen::MatrixXcd rho(d, d);
    for (Eigen::Index c = 0; c < d; ++c) {
        for (Eigen::Index r = 0; r < d; ++r) {
            rho(r, c) = v[static_cast<std::size_t>(c * d + r)];
        }
    }
    return rho;
}

SparseOperator build_hamiltonian(const SystemParams& params, const HilbertLayout& layout) {
    const SparseOperator a = cavity_annihilation(layout);
    const SparseOperator a_dag = a.dagger();
    const SparseOperator sigma = two_level_lowering();
    const SparseOperator z_local = sigma.dagger() * sigma;

    SparseOperator h = SparseOperator::from_triplets(layout.dim, layout.dim, {});
    for (int i = 0; i < params.n_emitters; ++i) {
        const SparseOperator s_i = embed(sigma, SiteIndex::emitter(i), layout);
        const SparseOperator s_i_dag = s_i.dagger();
        h = h + Complex(params.detuning(i), 0.0) * embed(z_local, SiteIndex::emitter(i), layout);
        h = h + Complex(params.g, 0.0) * (s_i_dag * a + s_i * a_dag);
    }
    h.prune();
    return h;
}

SparseOperator build_dissipator(const SparseOperator& x, double rate) {
    const SparseOperator eye = SparseOperator::identity(x.rows());
    const SparseOperator xdx = x.dagger() * x;
    SparseOperator d = kron(x.conjugate(), x) - Complex(0.5, 0.0) * kron(eye, xdx) -
                       Complex(0.5, 0.0) * kron(xdx.transpose(), eye);
    d = Complex(rate, 0.0) * d;
    d.prune();
    return d;
}

Liouvillian build_liouvillian(const SystemParams& params) {
    const HilbertLayout layout = params.layout();
    const SparseOperator h = build_hamiltonian(params, layout);
    const SparseOperator eye = SparseOperator::identity(layout.dim);
    const Complex minus_i(0.0, -1.0);

    SparseOperator l = minus_i * (kron(eye, h) - kron(h.transpose(), eye));
    l = l + build_dissipator(cavity_annihilation(layout), params.kappa);
    const SparseOperator sigma = two_level_lowering();
    const SparseOperator z_local = sigma.dagger() * sigma;
    for (int i = 0; i < params.n_emitters; ++i) {
        if (params.pump > 0.0) {
            l = l + build_dissipator(embed(sigma.dagger(), SiteIndex::emitter(i), layout), params.pump);
        }
        if (params.dephasing > 0.0) {
            l = l + build_dissipator(embed(z_local, SiteIndex::emitter(i), layout), params.dephasing);
        }
    }
    l.prune(0.0);
    return Liouvillian{std::move(l), layout, params};
}

int excitation_number(int basis_index, const HilbertLayout& layout) {
    const int spin_bits = basis_index & ((1 << layout.n_emitters) - 1);
    return layout.photon_number(basis_index) + std::popcount(static_cast<unsigned>(spin_bits));
}

SectorBasis sector_basis(const HilbertLayout& layout, int k) {
    const int d = layout.dim;
    std::vector<int> exc(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) exc[static_cast<std::size_t>(i)] = excitation_number(i, layout);

    SectorBasis sector;
    sector.k = k;
    sector.full_dim = d * d;
    sector.compact_index.assign(static_cast<std::size_t>(d) * d, -1);
    for (int col = 0; col < d; ++col) {
        for (int row = 0; row < d; ++row) {
            if (exc[static_cast<std::size_t>(row)] - exc[static_cast<std::size_t>(col)] == k) {
                const int v = col * d + row;
                sector.compact_index[static_cast<std::size_t>(v)] =
                    static_cast<int>(sector.full_index.size());
                sector.full_index.push_back(v);
            }
        }
    }
    return sector;
}

SparseOperator restrict_to_sector(const SparseOperator& a, const SectorBasis& sector) {
    if (a.rows() != sector.full_dim || a.cols() != sector.full_dim) {
        throw std::invalid_argument("restrict_to_sector: dimension mismatch");
    }
    std::vector<Triplet> triplets;
    const int n = sector.dim();
    for (int rc = 0; rc < n; ++rc) {
        const int r = sector.full_index[static_cast<std::size_t>(rc)];
        for (std::int64_t k = a.row_ptr()[r]; k < a.row_ptr()[r + 1]; ++k) {
            const int c = a.col_ind()[static_cast<std::size_t>(k)];
            const int cc = sector.compact_index[static_cast<std::size_t>(c)];
            if (cc >= 0) {
                triplets.push_back({rc, cc, a.values()[static_cast<std::size_t>(k)]});
            } else if (std::abs(a.values()[static_cast<std::size_t>(k)]) > 0.0) {
                throw std::invalid_argument("restrict_to_sector: operator couples out of the sector");
            }
        }
    }
    return SparseOperator::from_triplets(n, n, std::move(triplets));
}

std::vector<Complex> restrict_vector(std::span<const Complex> full, const SectorBasis& sector) {
    if (static_cast<int>(full.size()) != sector.full_dim) {
        throw std::invalid_argument("restrict_vector: dimension mismatch");
    }
    std::vector<Complex> out(sector.full_index.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = full[static_cast<std::size_t>(sector.full_index[i])];
    }
    return out;
}

std::vector<Complex> expand_vector(std::span<const Complex> compact, const SectorBasis& sector) {
    if (compact.size() != sector.full_index.size()) {
        throw std::invalid_argument("expand_vector: dimension mismatch");
    }
    std::vector<Complex> out(static_cast<std::size_t>(sector.full_dim), Complex(0.0, 0.0));
    for (std::size_t i = 0; i < compact.size(); ++i) {
        out[static_cast<std::size_t>(sector.full_index[i])] = compact[i];
    }
    return out;
}

DensityMatrix ground_state(const HilbertLayout& layout) {
    return basis_projector(layout, 0, 0u);
}

DensityMatrix basis_projector(const HilbertLayout& layout, int cavity_level, unsigned emitter_bits) {
    if (cavity_level < 0 || cavity_level > layout.n_max) {
        throw std::invalid_argument("basis_projector: cavity level out of range");
    }
    int index = cavity_level << layout.n_emitters;
    for (int i = 0; i < layout.n_emitters; ++i) {
        if ((emitter_bits >> i) & 1u) index += 1 << (layout.n_emitters - 1 - i);
    }
    DensityMatrix rho{std::vector<Complex>(
                          static_cast<std::size_t>(layout.dim) * static_cast<std::size_t>(layout.dim),
                          Complex(0.0, 0.0)),
                      layout};
    rho.vec[static_cast<std::size_t>(index) * layout.dim + index] = Complex(1.0, 0.0);
    return rho;
}

}  // namespace tcsim
