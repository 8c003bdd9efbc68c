#include "tcsim/observables.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>

#include "tcsim/steady_state.hpp"

namespace tcsim {

namespace {

constexpr double kSmallnessThreshold = 1e-8;

int popcount_bits(int state, int n_emitters) {
    int bits = state & ((1 << n_emitters) - 1);
    int c = 0;
    while (bits) {
        c += bits & 1;
        bits >>= 1;
    }
    return c;
}

/// Functional w -> tr(op unvec(w)) as a dense row vector over vec indices.
std::vector<Complex> trace_functional(const SparseOperator& op) {
    const int d = op.rows();
    std::vector<Complex> f(static_cast<std::size_t>(d) * d, Complex(0.0, 0.0));
    for (int r = 0; r < d; ++r) {
        for (std::int64_t k = op.row_ptr()[r]; k < op.row_ptr()[r + 1]; ++k) {
            const int c = op.col_ind()[static_cast<std::size_t>(k)];
            // tr(op rho) = sum_{r,c} op(r,c) rho(c,r); vec index of rho(c,r) is r*d + c.
            f[static_cast<std::size_t>(r) * d + c] = op.values()[static_cast<std::size_t>(k)];
        }
    }
    return f;
}

/// vec(op * rho): applies op to each column of the stacked density matrix.
std::vector<Complex> apply_left(const SparseOperator& op, const DensityMatrix& rho) {
    const int d = rho.layout.dim;
    std::vector<Complex> out(rho.vec.size());
    for (int c = 0; c < d; ++c) {
        op.apply(std::span<const Complex>(rho.vec.data() + static_cast<std::size_t>(c) * d,
                                          static_cast<std::size_t>(d)),
                 std::span<Complex>(out.data() + static_cast<std::size_t>(c) * d,
                                    static_cast<std::size_t>(d)));
    }
    return out;
}

std::mutex fftw_plan_mutex;

}  // namespace

Complex expectation(const DensityMatrix& rho, const SparseOperator& op) {
    const int d = rho.layout.dim;
    if (op.rows() != d || op.cols() != d) {
        throw std::invalid_argument("expectation: operator/state dimension mismatch");
    }
    Complex acc(0.0, 0.0);
    for (int r = 0; r < d; ++r) {
        for (std::int64_t k = op.row_ptr()[r]; k < op.row_ptr()[r + 1]; ++k) {
            const int c = op.col_ind()[static_cast<std::size_t>(k)];
            acc += op.values()[static_cast<std::size_t>(k)] *
                   rho.vec[static_cast<std::size_t>(r) * d + c];
        }
    }
    return acc;
}

std::optional<double> g2_zero(const DensityMatrix& rho) {
    const HilbertLayout& layout = rho.layout;
    const int d = layout.dim;
    const int block = d / layout.cavity_dim();
    // <a^dag a> and <a^dag a^dag a a> are diagonal in the Fock ladder.
    double n = 0.0;
    double n2 = 0.0;
    for (int i = 0; i < d; ++i) {
        const double p = rho.vec[static_cast<std::size_t>(i) * d + i].real();
        const double m = static_cast<double>(i / block);
        n += m * p;
        n2 += m * (m - 1.0) * p;
    }
    if (n < kSmallnessThreshold) return std::nullopt;
    return n2 / (n * n);
}

ObservableRecord compute_observables(const DensityMatrix& rho, const SystemParams& params) {
    const HilbertLayout& layout = rho.layout;
    const int d = layout.dim;
    const int block = d / layout.cavity_dim();

    ObservableRecord record;
    record.params = params;
    for (int i = 0; i < d; ++i) {
        const double p = rho.vec[static_cast<std::size_t>(i) * d + i].real();
        record.n += static_cast<double>(i / block) * p;
        record.z += popcount_bits(i, layout.n_emitters) * p;
    }
    const SparseOperator j = collective_lowering(layout);
    record.n_j = expectation(rho, j.dagger() * j).real();
    record.g2 = g2_zero(rho);
    return record;
}

CorrelationTrace first_order_correlation(const DensityMatrix& rho_s, const Liouvillian& l,
                                         std::span<const double> t_grid,
                                         const PropagatorOptions& options, double stationarity_tol) {
    std::vector<Complex> residual_buf(rho_s.vec.size());
    l.matrix.apply(rho_s.vec, residual_buf);
    double res = 0.0;
    for (const auto& c : residual_buf) res += std::norm(c);
    if (std::sqrt(res) > stationarity_tol) {
        throw std::invalid_argument("first_order_correlation: input state is not stationary");
    }

    const SparseOperator a = cavity_annihilation(l.layout);
    const std::vector<Complex> v0 = apply_left(a, rho_s);
    const std::vector<Complex> f = trace_functional(a.dagger());

    CorrelationTrace trace;
    trace.t.assign(t_grid.begin(), t_grid.end());

    // vec(a rho) lives in the k = -1 excitation-difference sector, which the
    // generator preserves, so the propagation restricts to that block.
    const SectorBasis sector = sector_basis(l.layout, -1);
    const std::vector<Complex> v0c = restrict_vector(v0, sector);
    double norm_full = 0.0;
    double norm_compact = 0.0;
    for (const auto& c : v0) norm_full += std::norm(c);
    for (const auto& c : v0c) norm_compact += std::norm(c);
    if (norm_full - norm_compact <= 1e-20 * std::max(norm_full, 1.0)) {
        const SparseOperator lc = restrict_to_sector(l.matrix, sector);
        trace.g = sample_linear_functional(lc, v0c, restrict_vector(f, sector), t_grid, options);
    } else {
        // Out-of-sector weight (a state not produced by this model): propagate in full.
        trace.g = sample_linear_functional(l.matrix, v0, f, t_grid, options);
    }
    return trace;
}

SpectrumTrace spectrum(const CorrelationTrace& correlation) {
    const std::size_t nt = correlation.t.size();
    if (nt < 4) throw std::invalid_argument("spectrum: correlation grid too short");
    const double dt = correlation.t[1] - correlation.t[0];
    for (std::size_t i = 1; i < nt; ++i) {
        if (std::abs(correlation.t[i] - correlation.t[i - 1] - dt) > 1e-9 * dt) {
            throw std::invalid_argument("spectrum: grid must be uniform");
        }
    }
    const double g0 = std::abs(correlation.g.front());
    double tail = 0.0;
    for (std::size_t i = nt - std::max<std::size_t>(1, nt / 64); i < nt; ++i) {
        tail = std::max(tail, std::abs(correlation.g[i]));
    }
    SpectrumTrace out;
    out.correlation = correlation;
    out.t_max = correlation.t.back();
    if (g0 < 1e-12) {
        // No field: flat zero spectrum on the natural grid.
        out.omega.assign(nt, 0.0);
        out.s.assign(nt, 0.0);
        for (std::size_t i = 0; i < nt; ++i) {
            out.omega[i] = -M_PI / dt + 2.0 * M_PI * static_cast<double>(i) / (static_cast<double>(nt) * dt);
        }
        return out;
    }
    if (tail > 1e-4 * g0) {
        throw HorizonError("spectrum: correlation has not decayed; extend the time horizon");
    }

    std::size_t m = 1;
    while (m < 2 * nt) m <<= 1;

    std::vector<Complex> in(m, Complex(0.0, 0.0));
    in[0] = Complex(correlation.g[0].real(), 0.0);
    for (std::size_t j = 1; j < nt; ++j) {
        in[j] = correlation.g[j];
        in[m - j] = std::conj(correlation.g[j]);  // Hermitian extension G(-t) = conj(G(t))
    }
    std::vector<Complex> transformed(m);
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex);
        fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(m),
                                          reinterpret_cast<fftw_complex*>(in.data()),
                                          reinterpret_cast<fftw_complex*>(transformed.data()),
                                          FFTW_FORWARD, FFTW_ESTIMATE);
        fftw_execute(plan);
        fftw_destroy_plan(plan);
    }

    out.omega.resize(m);
    out.s.resize(m);
    // fftshift so omega ascends from -pi/dt.
    const std::size_t half = m / 2;
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t src = (k + half) % m;
        const double freq_index = static_cast<double>(k) - static_cast<double>(half);
        out.omega[k] = 2.0 * M_PI * freq_index / (static_cast<double>(m) * dt);
        out.s[k] = dt * transformed[src].real();
    }

    // Peak list and FWHM of the dominant peak.
    double s_max = 0.0;
    std::size_t k_max = 0;
    for (std::size_t k = 0; k < m; ++k) {
        if (out.s[k] > s_max) {
            s_max = out.s[k];
            k_max = k;
        }
    }
    for (std::size_t k = 1; k + 1 < m; ++k) {
        if (out.s[k] > out.s[k - 1] && out.s[k] >= out.s[k + 1] && out.s[k] >= 0.05 * s_max) {
            out.peaks.emplace_back(out.omega[k], out.s[k]);
        }
    }
    std::sort(out.peaks.begin(), out.peaks.end(),
              [](const auto& a, const auto& b) { return a.second > b.second; });
    if (out.peaks.size() > 8) out.peaks.resize(8);

    const double half_max = 0.5 * s_max;
    auto interpolate = [&](std::size_t lo, std::size_t hi) {
        const double s_lo = out.s[lo];
        const double s_hi = out.s[hi];
        if (s_hi == s_lo) return out.omega[lo];
        return out.omega[lo] + (half_max - s_lo) * (out.omega[hi] - out.omega[lo]) / (s_hi - s_lo);
    };
    double left = out.omega.front();
    for (std::size_t k = k_max; k > 0; --k) {
        if (out.s[k - 1] < half_max) {
            left = interpolate(k - 1, k);
            break;
        }
    }
    double right = out.omega.back();
    for (std::size_t k = k_max; k + 1 < m; ++k) {
        if (out.s[k + 1] < half_max) {
            right = interpolate(k + 1, k);
            break;
        }
    }
    out.fwhm = right - left;
    return out;
}

SpectrumTrace emission_spectrum(const DensityMatrix& rho_s, const Liouvillian& l,
                                const SpectrumComputeOptions& options) {
    const SystemParams& p = l.params;
    double max_detuning = 0.0;
    for (int i = 0; i < p.n_emitters; ++i) max_detuning = std::max(max_detuning, std::abs(p.detuning(i)));
    const double span = 2.0 * p.g * std::sqrt(static_cast<double>(p.n_emitters) * (p.n_max + 1)) +
                        max_detuning + p.kappa + p.pump + p.dephasing;
    const double dt = options.dt > 0.0 ? options.dt : (M_PI / span) / 4.0;
    double t_max = options.initial_t_max > 0.0 ? options.initial_t_max
                                               : std::max(256.0 * dt, 10.0 / p.kappa);

    for (int round = 0; round <= options.max_doublings; ++round) {
        const auto nt = static_cast<std::size_t>(std::ceil(t_max / dt)) + 1;
        std::vector<double> grid(nt);
        for (std::size_t i = 0; i < nt; ++i) grid[i] = static_cast<double>(i) * dt;
        CorrelationTrace corr =
            first_order_correlation(rho_s, l, grid, options.propagator, options.stationarity_tol);
        const double g0 = std::abs(corr.g.front());
        double tail = 0.0;
        for (std::size_t i = nt - std::max<std::size_t>(1, nt / 64); i < nt; ++i) {
            tail = std::max(tail, std::abs(corr.g[i]));
        }
        if (g0 < 1e-12 || tail <= options.decay_target * g0) {
            return spectrum(corr);
        }
        t_max *= 2.0;
    }
    throw HorizonError("emission_spectrum: correlation did not decay within the horizon budget");
}

}  // namespace tcsim
