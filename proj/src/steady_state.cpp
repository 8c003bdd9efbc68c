#include "tcsim/steady_state.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <Eigen/UmfPackSupport>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace tcsim {

namespace {

using EigenSparse = Eigen::SparseMatrix<Complex>;
using Vector = Eigen::VectorXcd;

EigenSparse to_eigen_shifted(const SparseOperator& a, double shift) {
    std::vector<Eigen::Triplet<Complex>> triplets;
    triplets.reserve(static_cast<std::size_t>(a.nnz()) + static_cast<std::size_t>(a.rows()));
    for (int r = 0; r < a.rows(); ++r) {
        for (std::int64_t k = a.row_ptr()[r]; k < a.row_ptr()[r + 1]; ++k) {
            triplets.emplace_back(r, a.col_ind()[static_cast<std::size_t>(k)],
                                  a.values()[static_cast<std::size_t>(k)]);
        }
        triplets.emplace_back(r, r, Complex(-shift, 0.0));
    }
    EigenSparse m(a.rows(), a.cols());
    m.setFromTriplets(triplets.begin(), triplets.end());
    m.makeCompressed();
    return m;
}

struct ArnoldiResult {
    Eigen::MatrixXcd v;       // n x m_eff orthonormal basis
    Eigen::MatrixXcd h;       // m_eff x m_eff upper Hessenberg
    int m_eff = 0;
    bool breakdown = false;
};

/// Arnoldi factorization with modified Gram-Schmidt of the shift-and-invert
/// operator v -> (L - shift I)^{-1} v.
template <typename OpFn>
ArnoldiResult arnoldi_op(OpFn&& op, const Vector& v0, int m) {
    const auto n = v0.size();
    ArnoldiResult out;
    out.v.resize(n, m);
    out.h = Eigen::MatrixXcd::Zero(m, m);
    out.v.col(0) = v0 / v0.norm();
    int j = 0;
    for (; j < m; ++j) {
        Vector w = op(out.v.col(j));
        for (int i = 0; i <= j; ++i) {
            const Complex hij = out.v.col(i).dot(w);
            out.h(i, j) = hij;
            w -= hij * out.v.col(i);
        }
        const double hnext = w.norm();
        if (j + 1 < m) {
            if (hnext < 1e-14) {
                out.breakdown = true;
                ++j;
                break;
            }
            out.h(j + 1, j) = Complex(hnext, 0.0);
            out.v.col(j + 1) = w / hnext;
        } else {
            ++j;
            break;
        }
    }
    out.m_eff = j;
    out.v.conservativeResize(n, j);
    out.h.conservativeResize(j, j);
    return out;
}

}  // namespace

double fock_level_population(const DensityMatrix& rho, int level) {
    const int d = rho.layout.dim;
    const int block = d / rho.layout.cavity_dim();
    double pop = 0.0;
    for (int i = level * block; i < (level + 1) * block; ++i) {
        pop += rho.vec[static_cast<std::size_t>(i) * d + i].real();
    }
    return pop;
}

double cavity_population(const DensityMatrix& rho) {
    double n = 0.0;
    for (int level = 1; level <= rho.layout.n_max; ++level) {
        n += level * fock_level_population(rho, level);
    }
    return n;
}

SteadyStateResult solve_steady(const Liouvillian& liouvillian, const SteadyStateOptions& options) {
    if (options.tol <= 0.0) throw std::invalid_argument("solve_steady: tol must be positive");
    // Any stationary density matrix lives in the k = 0 excitation-difference
    // sector, so the eigenproblem shrinks to that block of the generator.
    const SectorBasis sector = sector_basis(liouvillian.layout, 0);
    const SparseOperator l = restrict_to_sector(liouvillian.matrix, sector);
    const auto n = static_cast<Eigen::Index>(l.rows());

    Eigen::UmfPackLU<EigenSparse> lu;
    double shift = options.shift * liouvillian.params.kappa;
    bool factorized = false;
    EigenSparse shifted;  // must outlive lu: the solver keeps a reference
    for (int attempt = 0; attempt < 4 && !factorized; ++attempt) {
        shifted = to_eigen_shifted(l, shift);
        lu.compute(shifted);
        if (lu.info() == Eigen::Success) {
            factorized = true;
        } else {
            shift *= 7.3;  // perturb away from a singular shift
        }
    }
    if (!factorized) throw ConvergenceError("solve_steady: factorization of (L - shift I) failed");

    auto op = [&](const Vector& x) -> Vector { return lu.solve(x); };

    // vec(I) has unit trace overlap with the steady state, a safe start.
    Vector v0 = Vector::Zero(n);
    const int d = liouvillian.layout.dim;
    for (int i = 0; i < d; ++i) {
        v0(sector.compact_index[static_cast<std::size_t>(i) * d + i]) = Complex(1.0, 0.0);
    }

    const double residual_floor = 50.0 * std::numeric_limits<double>::epsilon() * l.norm_inf();
    const double target = std::max(options.tol, residual_floor);

    Vector best_x;
    double best_residual = std::numeric_limits<double>::infinity();
    double gap_estimate = 0.0;

    std::vector<Complex> lx_buf(static_cast<std::size_t>(n));
    for (int restart = 0; restart < options.max_restarts; ++restart) {
        ArnoldiResult fac = arnoldi_op(op, v0, options.krylov_dim);
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eig(fac.h);
        if (eig.info() != Eigen::Success) {
            throw ConvergenceError("solve_steady: Hessenberg eigendecomposition failed");
        }
        // Largest |theta| of the inverted operator corresponds to the
        // Liouvillian eigenvalue nearest the shift.
        std::vector<int> order(static_cast<std::size_t>(fac.m_eff));
        for (int i = 0; i < fac.m_eff; ++i) order[static_cast<std::size_t>(i)] = i;
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return std::abs(eig.eigenvalues()(a)) > std::abs(eig.eigenvalues()(b));
        });

        if (fac.m_eff > 1) {
            int near_zero = 0;
            for (int i = 0; i < fac.m_eff; ++i) {
                const Complex theta = eig.eigenvalues()(order[static_cast<std::size_t>(i)]);
                if (std::abs(theta) > 0.0 &&
                    std::abs(shift + 1.0 / theta) <= std::max(options.tol, residual_floor)) {
                    ++near_zero;
                }
            }
            if (near_zero >= 2) {
                throw NonUniqueSteadyStateError("solve_steady: degenerate null space detected");
            }
            const Complex theta2 = eig.eigenvalues()(order[1]);
            if (std::abs(theta2) > 0.0) gap_estimate = std::abs(shift + 1.0 / theta2);
        }

        Vector x = fac.v * eig.eigenvectors().col(order[0]);
        x /= x.norm();
        l.apply(std::span<const Complex>(x.data(), static_cast<std::size_t>(n)),
                std::span<Complex>(lx_buf.data(), lx_buf.size()));
        double residual = 0.0;
        for (const auto& c : lx_buf) residual += std::norm(c);
        residual = std::sqrt(residual);

        if (residual < best_residual) {
            best_residual = residual;
            best_x = x;
        }
        if (best_residual <= target) break;
        if (restart + 1 == options.max_restarts) {
            throw ConvergenceError("solve_steady: no convergence after max restarts (residual " +
                                   std::to_string(best_residual) + ")");
        }
        v0 = x;
    }

    // A Krylov space grown from one vector collapses a degenerate eigenspace
    // to a single direction, so exact degeneracy is invisible above. Rerun
    // from an independent start and require agreement up to phase.
    {
        std::mt19937_64 rng(0x5eed);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        Vector v1(n);
        for (Eigen::Index i = 0; i < n; ++i) v1(i) = Complex(dist(rng), dist(rng));
        double other_residual = std::numeric_limits<double>::infinity();
        Vector other;
        for (int restart = 0; restart < options.max_restarts; ++restart) {
            ArnoldiResult fac = arnoldi_op(op, v1, options.krylov_dim);
            Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eig(fac.h);
            if (eig.info() != Eigen::Success) break;
            int top = 0;
            for (int i = 1; i < fac.m_eff; ++i) {
                if (std::abs(eig.eigenvalues()(i)) > std::abs(eig.eigenvalues()(top))) top = i;
            }
            Vector x = fac.v * eig.eigenvectors().col(top);
            x /= x.norm();
            l.apply(std::span<const Complex>(x.data(), static_cast<std::size_t>(n)),
                    std::span<Complex>(lx_buf.data(), lx_buf.size()));
            double residual = 0.0;
            for (const auto& c : lx_buf) residual += std::norm(c);
            residual = std::sqrt(residual);
            if (residual < other_residual) {
                other_residual = residual;
                other = x;
            }
            if (other_residual <= target) break;
            v1 = x;
        }
        if (other_residual <= target) {
            const double overlap = std::abs(other.dot(best_x)) / best_x.norm();
            if (overlap < 1.0 - 1e-6) {
                throw NonUniqueSteadyStateError("solve_steady: degenerate null space detected");
            }
        }
    }

    DensityMatrix rho{expand_vector(std::span<const Complex>(best_x.data(), static_cast<std::size_t>(n)),
                                    sector),
                      liouvillian.layout};
    // Arnoldi fixes neither phase nor scale; the physical gauge does.
    rho.hermitize();
    rho.normalize();
    rho.hermitize();

    SteadyStateResult result;
    std::vector<Complex> full_buf(rho.vec.size());
    liouvillian.matrix.apply(rho.vec, full_buf);
    double res = 0.0;
    for (const auto& c : full_buf) res += std::norm(c);
    result.residual = std::sqrt(res);
    result.truncation_tail = fock_level_population(rho, liouvillian.layout.n_max);
    result.spectral_gap_estimate = gap_estimate;
    result.rho = std::move(rho);
    return result;
}

DensityMatrix dense_null_space(const Liouvillian& liouvillian, int dim_cap) {
    const SparseOperator& l = liouvillian.matrix;
    const int n = l.rows();
    if (n > dim_cap) {
        throw std::invalid_argument("dense_null_space: dimension exceeds the oracle cap");
    }
    Eigen::MatrixXcd dense = Eigen::MatrixXcd::Zero(n, n);
    for (int r = 0; r < n; ++r) {
        for (std::int64_t k = l.row_ptr()[r]; k < l.row_ptr()[r + 1]; ++k) {
            dense(r, l.col_ind()[static_cast<std::size_t>(k)]) = l.values()[static_cast<std::size_t>(k)];
        }
    }
    const int d = liouvillian.layout.dim;
    Vector t = Vector::Zero(n);
    for (int i = 0; i < d; ++i) t(static_cast<Eigen::Index>(i) * d + i) = Complex(1.0, 0.0);

    // (L + t w^dag) x = t has the steady state with w^dag x = 1 as solution:
    // multiplying by the left null vector t^dag forces the constraint. With a
    // one-dimensional null space any constraint direction w yields the same
    // state after trace normalization, so solving under two independent
    // constraints and comparing exposes degeneracy.
    const double norm_scale = std::max(1.0, l.norm_inf());
    auto constrained_solve = [&](const Vector& w) -> Vector {
        Eigen::MatrixXcd augmented = dense + t * w.adjoint();
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(augmented);
        // L + t w^dag is nonsingular iff the null space is one-dimensional
        // (a second null vector can be chosen with w^dag nu = 0).
        if (!(lu.rcond() >= 1e-13)) {  // also catches the NaN of an exactly singular factor
            throw NonUniqueSteadyStateError("dense_null_space: null space is not one-dimensional");
        }
        Vector x = lu.solve(t);
        const double residual = (dense * x).norm();
        if (!(residual <= 1e-9 * std::max(1.0, x.norm()) * norm_scale)) {
            throw NonUniqueSteadyStateError("dense_null_space: no unique constrained solution");
        }
        const Complex trace = t.dot(x);
        if (std::abs(trace) < 1e-12 * x.norm()) {
            throw NonUniqueSteadyStateError("dense_null_space: traceless null vector");
        }
        return x / trace;
    };

    std::mt19937_64 rng(0xd1ce);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Vector w(n);
    for (int i = 0; i < n; ++i) w(i) = Complex(dist(rng), dist(rng));

    const Vector x = constrained_solve(t);
    const Vector x_check = constrained_solve(w);
    if ((x - x_check).norm() > 1e-7 * std::max(1.0, x.norm())) {
        throw NonUniqueSteadyStateError("dense_null_space: null space is not one-dimensional");
    }

    DensityMatrix rho{std::vector<Complex>(x.data(), x.data() + n), liouvillian.layout};
    rho.hermitize();
    rho.normalize();
    rho.hermitize();
    return rho;
}

TruncationVerdict check_truncation(const SteadyStateResult& result, double threshold) {
    TruncationVerdict verdict;
    verdict.tail = result.truncation_tail;
    const double n = cavity_population(result.rho);
    verdict.ok = verdict.tail <= threshold * std::max(n, 1.0);
    verdict.recommended_n_max =
        verdict.ok ? result.rho.layout.n_max : 2 * std::max(result.rho.layout.n_max, 1);
    return verdict;
}

}  // namespace tcsim
