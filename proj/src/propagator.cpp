#include "tcsim/propagator.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <cmath>
#include <stdexcept>

namespace tcsim {

namespace {

using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

/// Evaluates s(tau) = e^{H tau} e1 * beta for the small Hessenberg block,
/// via eigendecomposition when it is well conditioned.
class SmallPropagator {
public:
    SmallPropagator(const Matrix& h, double beta) : h_(h), beta_(beta) {
        Eigen::ComplexEigenSolver<Matrix> eig(h);
        use_eig_ = eig.info() == Eigen::Success;
        if (use_eig_) {
            evals_ = eig.eigenvalues();
            evecs_ = eig.eigenvectors();
            lu_.compute(evecs_);
            const Matrix recon = evecs_ * evals_.asDiagonal() * lu_.solve(Matrix::Identity(h.rows(), h.cols()));
            const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
            if (!((recon - h).cwiseAbs().maxCoeff() < 1e-8 * scale)) use_eig_ = false;
        }
        if (use_eig_) {
            Vector e1 = Vector::Zero(h.rows());
            e1(0) = Complex(beta, 0.0);
            w0_ = lu_.solve(e1);
        }
    }

    Vector at(double tau) const {
        if (use_eig_) {
            Vector scaled = w0_;
            for (Eigen::Index i = 0; i < scaled.size(); ++i) {
                scaled(i) *= std::exp(evals_(i) * tau);
            }
            return evecs_ * scaled;
        }
        // Near-defective block: dense scaling-and-squaring on the m x m matrix.
        Vector e1 = Vector::Zero(h_.rows());
        e1(0) = Complex(beta_, 0.0);
        return expm_dense(tau * h_) * e1;
    }

private:
    Matrix h_;
    double beta_;
    bool use_eig_ = false;
    Vector evals_;
    Matrix evecs_;
    Vector w0_;  // U^{-1} e1 * beta
    Eigen::PartialPivLU<Matrix> lu_;
};

KrylovBasis arnoldi_impl(const SparseOperator& a, std::span<const Complex> v0, int m) {
    if (m < 1) throw std::invalid_argument("arnoldi: m must be >= 1");
    const auto n = static_cast<Eigen::Index>(v0.size());
    Vector start = Eigen::Map<const Vector>(v0.data(), n);
    const double beta = start.norm();
    if (beta == 0.0) throw std::invalid_argument("arnoldi: zero input vector");

    KrylovBasis out;
    out.v.resize(n, m);
    out.h_small = Matrix::Zero(m, m);
    out.v.col(0) = start / beta;

    std::vector<Complex> w_buf(static_cast<std::size_t>(n));
    int j = 0;
    for (; j < m; ++j) {
        a.apply(std::span<const Complex>(out.v.col(j).data(), static_cast<std::size_t>(n)),
                std::span<Complex>(w_buf.data(), w_buf.size()));
        Vector w = Eigen::Map<Vector>(w_buf.data(), n);
        for (int i = 0; i <= j; ++i) {
            const Complex hij = out.v.col(i).dot(w);
            out.h_small(i, j) = hij;
            w -= hij * out.v.col(i);
        }
        const double hnext = w.norm();
        if (hnext < 1e-14) {
            out.breakdown = true;
            out.h_next = 0.0;
            ++j;
            break;
        }
        if (j + 1 < m) {
            out.h_small(j + 1, j) = Complex(hnext, 0.0);
            out.v.col(j + 1) = w / hnext;
        } else {
            out.h_next = hnext;
            ++j;
            break;
        }
    }
    out.m = j;
    out.v.conservativeResize(n, j);
    out.h_small.conservativeResize(j, j);
    return out;
}

}  // namespace

KrylovBasis arnoldi(const SparseOperator& a, std::span<const Complex> v0, int m) {
    return arnoldi_impl(a, v0, m);
}

KrylovBasis arnoldi(const Liouvillian& l, std::span<const Complex> v0, int m) {
    return arnoldi_impl(l.matrix, v0, m);
}

Eigen::MatrixXcd expm_dense(const Eigen::MatrixXcd& a) {
    // Pade(13) with scaling and squaring.
    static const double pade_coeffs[] = {
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
        129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
        1323241920.0,        40840800.0,          960960.0,           16380.0,
        182.0,               1.0};
    const auto n = a.rows();
    const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
    int squarings = 0;
    const double theta13 = 5.371920351148152;
    if (norm > theta13) {
        squarings = static_cast<int>(std::ceil(std::log2(norm / theta13)));
    }
    const Matrix scaled = a / std::pow(2.0, squarings);
    const Matrix a2 = scaled * scaled;
    const Matrix a4 = a2 * a2;
    const Matrix a6 = a2 * a4;
    const Matrix u = scaled * (a6 * (pade_coeffs[13] * a6 + pade_coeffs[11] * a4 + pade_coeffs[9] * a2) +
                               pade_coeffs[7] * a6 + pade_coeffs[5] * a4 + pade_coeffs[3] * a2 +
                               pade_coeffs[1] * Matrix::Identity(n, n));
    const Matrix v = a6 * (pade_coeffs[12] * a6 + pade_coeffs[10] * a4 + pade_coeffs[8] * a2) +
                     pade_coeffs[6] * a6 + pade_coeffs[4] * a4 + pade_coeffs[2] * a2 +
                     pade_coeffs[0] * Matrix::Identity(n, n);
    Matrix result = (v - u).partialPivLu().solve(v + u);
    for (int s = 0; s < squarings; ++s) result = result * result;
    return result;
}

namespace {

Vector expm_step_recursive(const SparseOperator& a, const Vector& v, double dt,
                           const PropagatorOptions& options, int depth) {
    const double beta = v.norm();
    if (beta == 0.0 || dt == 0.0) return v;
    KrylovBasis basis = arnoldi_impl(
        a, std::span<const Complex>(v.data(), static_cast<std::size_t>(v.size())), options.krylov_dim);
    SmallPropagator small(basis.h_small, beta);
    const Vector s = small.at(dt);
    if (!basis.breakdown) {
        const double err = basis.h_next * std::abs(s(basis.m - 1));
        if (err > options.step_tol * std::max(1.0, beta) && depth < 40) {
            const Vector half = expm_step_recursive(a, v, dt / 2.0, options, depth + 1);
            return expm_step_recursive(a, half, dt / 2.0, options, depth + 1);
        }
    }
    return basis.v * s;
}

}  // namespace

std::vector<Complex> expm_apply(const SparseOperator& a, std::span<const Complex> v, double dt,
                                const PropagatorOptions& options) {
    if (dt < 0.0) throw std::invalid_argument("expm_apply: dt must be >= 0");
    if (a.rows() != static_cast<int>(v.size())) {
        throw std::invalid_argument("expm_apply: dimension mismatch");
    }
    Vector x = Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
    if (dt == 0.0) return {x.data(), x.data() + x.size()};
    const Vector y = expm_step_recursive(a, x, dt, options, 0);
    return {y.data(), y.data() + y.size()};
}

std::vector<Complex> expm_apply(const Liouvillian& l, std::span<const Complex> v, double dt,
                                const PropagatorOptions& options) {
    return expm_apply(l.matrix, v, dt, options);
}

std::vector<DensityMatrix> propagate_density(const DensityMatrix& rho, const Liouvillian& l,
                                             std::span<const double> t_grid,
                                             const PropagatorOptions& options) {
    double prev = 0.0;
    for (double t : t_grid) {
        if (t < prev) throw std::invalid_argument("propagate_density: t_grid must ascend from >= 0");
        prev = t;
    }
    std::vector<DensityMatrix> out;
    out.reserve(t_grid.size());
    std::vector<Complex> state = rho.vec;
    double t_now = 0.0;
    for (double t : t_grid) {
        state = expm_apply(l.matrix, state, t - t_now, options);
        t_now = t;
        out.push_back(DensityMatrix{state, rho.layout});
    }
    return out;
}

std::vector<Complex> sample_linear_functional(const SparseOperator& a, std::span<const Complex> v0,
                                              std::span<const Complex> f,
                                              std::span<const double> t_grid,
                                              const PropagatorOptions& options) {
    const auto n = static_cast<Eigen::Index>(v0.size());
    if (f.size() != v0.size()) throw std::invalid_argument("sample_linear_functional: size mismatch");
    const Eigen::Map<const Vector> f_vec(f.data(), n);
    Vector v = Eigen::Map<const Vector>(v0.data(), n);
    std::vector<Complex> results(t_grid.size());

    std::size_t idx = 0;
    double t_now = 0.0;
    while (idx < t_grid.size() && t_grid[idx] <= 0.0) {
        results[idx] = (f_vec.transpose() * v).value();
        ++idx;
    }
    if (idx >= t_grid.size()) return results;

    double dt_try = t_grid[idx] - t_now;
    if (idx + 1 < t_grid.size()) dt_try = std::max(dt_try, t_grid[idx + 1] - t_grid[idx]);
    const double t_last = t_grid.back();

    while (idx < t_grid.size()) {
        const double beta = v.norm();
        if (beta == 0.0) {
            for (; idx < t_grid.size(); ++idx) results[idx] = Complex(0.0, 0.0);
            break;
        }
        KrylovBasis basis = arnoldi_impl(
            a, std::span<const Complex>(v.data(), static_cast<std::size_t>(n)), options.krylov_dim);
        SmallPropagator small(basis.h_small, beta);

        double dt = std::min(dt_try, t_last - t_now);
        if (basis.breakdown) {
            dt = t_last - t_now;  // the subspace is invariant, any step is exact
        } else {
            for (int halvings = 0; halvings < 40; ++halvings) {
                const Vector s_end = small.at(dt);
                const double err = basis.h_next * std::abs(s_end(basis.m - 1));
                if (err <= options.step_tol * std::max(1.0, beta)) {
                    if (err < 0.01 * options.step_tol * std::max(1.0, beta)) dt_try = dt * 1.6;
                    break;
                }
                dt *= 0.5;
                dt_try = dt;
            }
        }

        const Eigen::RowVectorXcd f_projected = f_vec.transpose() * basis.v;
        while (idx < t_grid.size() && t_grid[idx] <= t_now + dt * (1.0 + 1e-12)) {
            results[idx] = (f_projected * small.at(t_grid[idx] - t_now)).value();
            ++idx;
        }
        v = basis.v * small.at(dt);
        t_now += dt;
        if (t_now >= t_last && idx >= t_grid.size()) break;
    }
    return results;
}

}  // namespace tcsim
