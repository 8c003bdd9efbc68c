// Acceptance gate: one pass/fail line per criterion on stdout, progress on
// stderr, exit code = number of failed criteria.  Criteria 1, 2, and 4 check
// the solver stack against independent oracles and closed forms; criteria 3
// and 5-9 evaluate every shipped preset point once and assert the physics
// invariants and regime features on the shared results.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tcsim/config.hpp"
#include "tcsim/cooperativity.hpp"
#include "tcsim/observables.hpp"
#include "tcsim/propagator.hpp"
#include "tcsim/steady_state.hpp"

namespace {

using tcsim::Complex;
using tcsim::Liouvillian;
using tcsim::SystemParams;

double now_seconds() {
    using clock = std::chrono::steady_clock;
    static const clock::time_point start = clock::now();
    return std::chrono::duration<double>(clock::now() - start).count();
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

Eigen::MatrixXcd to_dense(const tcsim::SparseOperator& a) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(a.rows(), a.cols());
    for (int r = 0; r < a.rows(); ++r) {
        for (std::int64_t k = a.row_ptr()[r]; k < a.row_ptr()[r + 1]; ++k) {
            m(r, a.col_ind()[static_cast<std::size_t>(k)]) +=
                a.values()[static_cast<std::size_t>(k)];
        }
    }
    return m;
}

// ---------------------------------------------------------------------------
// Shared per-point evaluation for the preset-based criteria.

struct PointEval {
    double axis = 0.0;
    SystemParams params;
    tcsim::ObservableRecord record;
    std::optional<double> cf;
    std::optional<double> reference;
    std::optional<double> fwhm;
    std::optional<double> spectrum_norm_err;  // |integral S/2pi - n| / n
    std::vector<std::pair<double, double>> peaks;
    double h_defect = 0.0;      // Hamiltonian Hermiticity, relative
    double wl_defect = 0.0;     // |vec(I)^dag L|_max relative to max |L|
    double trace_defect = 0.0;  // |tr e^{L dt} rho_s - 1|
    double herm_defect = 0.0;   // Hermiticity of the propagated steady state
    double a_defect = 0.0;      // |<a>| in the steady state
    double residual = 0.0;
    double tail = 0.0;
};

struct SweepEval {
    std::string label;
    std::vector<PointEval> points;
};

PointEval evaluate_point(const SystemParams& p, bool want_spectrum) {
    PointEval out;
    out.params = p;
    const Liouvillian l = tcsim::build_liouvillian(p);

    {
        const Eigen::MatrixXcd h = to_dense(tcsim::build_hamiltonian(p, l.layout));
        const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
        out.h_defect = (h - h.adjoint()).cwiseAbs().maxCoeff() / scale;
    }
    {
        // vec(I)^dag L accumulates the diagonal rows of the generator; an exact
        // zero row vector is the infinitesimal form of trace preservation.
        const int d = l.layout.dim;
        std::vector<Complex> acc(static_cast<std::size_t>(l.matrix.cols()), Complex(0.0, 0.0));
        double l_max = 0.0;
        for (const Complex& v : l.matrix.values()) l_max = std::max(l_max, std::abs(v));
        for (int i = 0; i < d; ++i) {
            const auto row = static_cast<std::size_t>(i) * d + i;
            for (std::int64_t k = l.matrix.row_ptr()[row]; k < l.matrix.row_ptr()[row + 1]; ++k) {
                acc[static_cast<std::size_t>(l.matrix.col_ind()[static_cast<std::size_t>(k)])] +=
                    l.matrix.values()[static_cast<std::size_t>(k)];
            }
        }
        double worst = 0.0;
        for (const Complex& v : acc) worst = std::max(worst, std::abs(v));
        out.wl_defect = worst / std::max(1.0, l_max);
    }

    const tcsim::SteadyStateResult steady = tcsim::solve_steady(l);
    out.residual = steady.residual;
    out.tail = steady.truncation_tail;
    out.record = tcsim::compute_observables(steady.rho, p);
    out.reference = tcsim::reference_measure(out.record);
    out.a_defect = std::abs(tcsim::expectation(steady.rho, tcsim::cavity_annihilation(l.layout)));

    {
        // Trace and Hermiticity preservation under a finite propagation step.
        const tcsim::SectorBasis s0 = tcsim::sector_basis(l.layout, 0);
        const tcsim::SparseOperator lc = tcsim::restrict_to_sector(l.matrix, s0);
        const double rate =
            p.kappa + p.pump + p.dephasing + p.purcell_rate() * p.n_emitters;
        const std::vector<Complex> vt =
            tcsim::expm_apply(lc, tcsim::restrict_vector(steady.rho.vec, s0), 0.1 / rate);
        tcsim::DensityMatrix rho_t{tcsim::expand_vector(vt, s0), l.layout};
        out.trace_defect = std::abs(rho_t.trace() - Complex(1.0, 0.0));
        out.herm_defect = rho_t.hermiticity_defect();
    }

    if (out.record.n >= 1e-8) {
        // Cooperative fraction against per-emitter single-cavity references,
        // mirroring cooperative_fraction but reusing the shared solve above.
        double independent = 0.0;
        for (int i = 0; i < p.n_emitters; ++i) {
            SystemParams single = p;
            single.n_emitters = 1;
            single.detunings = {p.detuning(i)};
            const Liouvillian ls = tcsim::build_liouvillian(single);
            independent += tcsim::cavity_population(tcsim::solve_steady(ls).rho);
        }
        out.cf = (out.record.n - independent) / out.record.n;
    }

    if (want_spectrum) {
        tcsim::SpectrumComputeOptions options;
        options.stationarity_tol = std::max(options.stationarity_tol, 100.0 * steady.residual);
        const tcsim::SpectrumTrace s = tcsim::emission_spectrum(steady.rho, l, options);
        out.fwhm = s.fwhm;
        out.peaks = s.peaks;
        if (s.omega.size() > 1) {
            const double d_omega = s.omega[1] - s.omega[0];
            double integral = 0.0;
            for (double v : s.s) integral += v;
            integral *= d_omega / (2.0 * M_PI);
            out.spectrum_norm_err = std::abs(integral - out.record.n) / std::max(out.record.n, 1e-12);
        }
    }
    return out;
}

class PresetCache {
  public:
    const std::vector<SweepEval>& get(const std::string& preset) {
        auto it = cache_.find(preset);
        if (it != cache_.end()) return it->second;
        std::vector<SweepEval> evals;
        for (const tcsim::LabeledSweep& sweep : tcsim::preset_sweeps(preset)) {
            SweepEval eval;
            eval.label = sweep.label;
            for (std::size_t i = 0; i < sweep.spec.grid.size(); ++i) {
                const double v = sweep.spec.grid[i];
                const bool want_spectrum =
                    sweep.spec.outputs.spectrum &&
                    i % static_cast<std::size_t>(std::max(1, sweep.spec.outputs.spectrum_every)) == 0;
                const double t0 = now_seconds();
                PointEval point = evaluate_point(sweep.spec.params_at(v), want_spectrum);
                point.axis = v;
                std::fprintf(stderr, "  [%s%s%s] %zu/%zu axis=%.4g n=%.4g (%.1f s)\n",
                             preset.c_str(), eval.label.empty() ? "" : "/",
                             eval.label.c_str(), i + 1, sweep.spec.grid.size(), v,
                             point.record.n, now_seconds() - t0);
                eval.points.push_back(std::move(point));
            }
            evals.push_back(std::move(eval));
        }
        return cache_.emplace(preset, std::move(evals)).first->second;
    }

  private:
    std::map<std::string, std::vector<SweepEval>> cache_;
};

PresetCache g_presets;

// Pump value where cf crosses from negative to positive, interpolated in log P.
std::optional<double> crossing_pump(const std::vector<PointEval>& points) {
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        if (!points[i].cf || !points[i + 1].cf) continue;
        const double a = *points[i].cf;
        const double b = *points[i + 1].cf;
        if (a < 0.0 && b > 0.0) {
            const double la = std::log(points[i].axis);
            const double lb = std::log(points[i + 1].axis);
            return std::exp(la + (lb - la) * (-a) / (b - a));
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Criteria.

struct Outcome {
    bool pass = false;
    std::string detail;
};

Outcome criterion_steady_oracle() {
    std::mt19937_64 rng(20240817u);
    auto uniform = [&](double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    };
    // Mostly small systems plus a few at larger D; the oracle cost is the cube
    // of D^2, so the size mix keeps the total under the runtime budget.
    std::vector<std::pair<int, int>> shapes;  // (n_emitters, n_max)
    for (int t = 0; t < 48; ++t) {
        const int n = 1 + t % 3;
        const int cap = n == 1 ? 7 : (n == 2 ? 4 : 2);
        shapes.emplace_back(n, 1 + static_cast<int>(rng() % static_cast<unsigned>(cap)));
    }
    shapes.emplace_back(1, 15);  // D = 32
    shapes.emplace_back(2, 7);   // D = 32
    shapes.emplace_back(3, 3);   // D = 32
    shapes.emplace_back(2, 11);  // D = 48

    double worst = 0.0;
    for (const auto& [n_emitters, n_max] : shapes) {
        SystemParams p;
        p.n_emitters = n_emitters;
        p.n_max = n_max;
        p.g = uniform(0.05, 1.2);
        p.kappa = uniform(0.5, 2.0);
        p.pump = uniform(0.05, 2.0);
        p.dephasing = uniform(0.0, 0.5);
        p.detunings.clear();
        for (int i = 0; i < n_emitters; ++i) p.detunings.push_back(uniform(-0.5, 0.5));

        const Liouvillian l = tcsim::build_liouvillian(p);
        const tcsim::DensityMatrix iterative = tcsim::solve_steady(l).rho;
        const tcsim::DensityMatrix dense = tcsim::dense_null_space(l);
        double diff = 0.0;
        for (std::size_t i = 0; i < iterative.vec.size(); ++i) {
            diff = std::max(diff, std::abs(iterative.vec[i] - dense.vec[i]));
        }
        worst = std::max(worst, diff);
    }
    Outcome out;
    out.pass = shapes.size() >= 50 && worst <= 1e-8;
    out.detail = std::to_string(shapes.size()) + " parameter sets, worst elementwise diff " + fmt(worst);
    return out;
}

Outcome criterion_propagator_oracle() {
    std::mt19937_64 rng(911u);
    auto uniform = [&](double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    };
    std::normal_distribution<double> gauss(0.0, 1.0);
    double worst = 0.0;
    const int trials = 50;
    for (int t = 0; t < trials; ++t) {
        SystemParams p;
        p.n_emitters = 1 + t % 2;
        p.n_max = p.n_emitters == 1 ? 1 + static_cast<int>(rng() % 9u)
                                    : 1 + static_cast<int>(rng() % 4u);
        p.g = uniform(0.05, 1.5);
        p.kappa = uniform(0.5, 2.0);
        p.pump = uniform(0.0, 2.0);
        p.dephasing = uniform(0.0, 0.5);
        const Liouvillian l = tcsim::build_liouvillian(p);
        const Eigen::MatrixXcd dense = to_dense(l.matrix);

        Eigen::VectorXcd v0(dense.rows());
        for (Eigen::Index i = 0; i < v0.size(); ++i) v0[i] = Complex(gauss(rng), gauss(rng));
        v0.normalize();
        const std::vector<Complex> v0v(v0.data(), v0.data() + v0.size());

        for (double dt_k : {0.1, 1.0, 10.0}) {
            const double dt = dt_k / p.kappa;
            const std::vector<Complex> krylov = tcsim::expm_apply(l.matrix, v0v, dt);
            const Eigen::VectorXcd exact = tcsim::expm_dense(dense * dt) * v0;
            double num = 0.0;
            for (Eigen::Index i = 0; i < exact.size(); ++i) {
                num += std::norm(krylov[static_cast<std::size_t>(i)] - exact[i]);
            }
            worst = std::max(worst, std::sqrt(num) / exact.norm());
        }
    }
    Outcome out;
    out.pass = worst <= 1e-8;
    out.detail = std::to_string(trials) + " generators x 3 steps, worst relative diff " + fmt(worst);
    return out;
}

Outcome criterion_invariants() {
    double h = 0.0, wl = 0.0, tr = 0.0, he = 0.0, a = 0.0, sn = 0.0;
    std::string where;
    int points = 0;
    for (const std::string& preset : tcsim::preset_names()) {
        for (const SweepEval& sweep : g_presets.get(preset)) {
            for (const PointEval& pt : sweep.points) {
                ++points;
                auto track = [&](double& slot, double v) {
                    if (v > slot) {
                        slot = v;
                        where = preset + (sweep.label.empty() ? "" : "/" + sweep.label) +
                                " axis=" + fmt(pt.axis);
                    }
                };
                track(h, pt.h_defect);
                track(wl, pt.wl_defect);
                track(tr, pt.trace_defect);
                track(he, pt.herm_defect);
                track(a, pt.a_defect);
                if (pt.spectrum_norm_err) track(sn, *pt.spectrum_norm_err);
            }
        }
    }
    Outcome out;
    out.pass = h <= 1e-14 && wl <= 1e-12 && tr <= 1e-10 && he <= 1e-9 && a <= 1e-8 && sn <= 0.01;
    out.detail = std::to_string(points) + " preset points; worst: H " + fmt(h) + ", vec(I)L " +
                 fmt(wl) + ", trace " + fmt(tr) + ", herm " + fmt(he) + ", <a> " + fmt(a) +
                 ", spectrum norm " + fmt(sn) + " (last worst at " + where + ")";
    return out;
}

Outcome criterion_closed_forms() {
    std::ostringstream detail;
    bool pass = true;

    {  // Decoupled pump-only fixed point: vacuum cavity, fully excited emitters.
        SystemParams p;
        p.n_emitters = 2;
        p.g = 0.0;
        p.pump = 0.7;
        p.dephasing = 0.3;
        p.n_max = 3;
        const tcsim::DensityMatrix rho = tcsim::solve_steady(tcsim::build_liouvillian(p)).rho;
        const tcsim::DensityMatrix expected = tcsim::basis_projector(rho.layout, 0, 0b11u);
        double diff = 0.0;
        for (std::size_t i = 0; i < rho.vec.size(); ++i) {
            diff = std::max(diff, std::abs(rho.vec[i] - expected.vec[i]));
        }
        pass = pass && diff <= 1e-10;
        detail << "pump-only fixed point diff " << fmt(diff);
    }

    {  // Lossless vacuum Rabi exchange: photon population sin^2(g t).
        SystemParams p;
        p.n_emitters = 1;
        p.g = 0.8;
        p.kappa = 0.0;
        p.n_max = 2;
        const Liouvillian l = tcsim::build_liouvillian(p);
        const tcsim::DensityMatrix rho0 = tcsim::basis_projector(l.layout, 0, 1u);
        std::vector<double> grid;
        for (int i = 0; i <= 16; ++i) grid.push_back(0.3 * i);
        const std::vector<tcsim::DensityMatrix> states = tcsim::propagate_density(rho0, l, grid);
        double diff = 0.0;
        for (std::size_t i = 0; i < states.size(); ++i) {
            const double expected = std::pow(std::sin(p.g * grid[i]), 2);
            diff = std::max(diff, std::abs(tcsim::fock_level_population(states[i], 1) - expected));
        }
        pass = pass && diff <= 1e-6;
        detail << ", Rabi sin^2(gt) diff " << fmt(diff);
    }

    {  // Weak coupling: single-emitter excited population P/(P + Gamma).
        SystemParams p;
        p.n_emitters = 1;
        p.g = 0.01;
        p.n_max = 4;
        const double gamma = p.purcell_rate();
        double worst = 0.0;
        for (double ratio : {0.5, 1.0, 4.0}) {
            p.pump = ratio * gamma;
            const tcsim::DensityMatrix rho = tcsim::solve_steady(tcsim::build_liouvillian(p)).rho;
            const double z = tcsim::compute_observables(rho, p).z;
            const double expected = p.pump / (p.pump + gamma);
            worst = std::max(worst, std::abs(z - expected) / expected);
        }
        pass = pass && worst <= 0.02;
        detail << ", inversion P/(P+Gamma) rel diff " << fmt(worst);
    }

    return {pass, detail.str()};
}

Outcome criterion_fig2() {
    const std::vector<PointEval>& points = g_presets.get("fig2").front().points;
    const double gamma = points.front().params.purcell_rate();
    std::ostringstream detail;
    bool pass = true;

    int neg_to_pos = 0, pos_to_neg = 0;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        if (!points[i].cf || !points[i + 1].cf) continue;
        if (*points[i].cf < 0.0 && *points[i + 1].cf > 0.0) ++neg_to_pos;
        if (*points[i].cf > 0.0 && *points[i + 1].cf < 0.0) ++pos_to_neg;
    }
    const std::optional<double> crossing = crossing_pump(points);
    pass = pass && neg_to_pos == 1 && pos_to_neg == 0 && crossing &&
           *crossing >= 0.5 * gamma && *crossing <= 2.0 * gamma;
    detail << "sign changes -/+ " << neg_to_pos << " +/- " << pos_to_neg << ", crossing P = "
           << (crossing ? fmt(*crossing / gamma) : std::string("none")) << " Gamma";

    int sign_disagreements = 0;
    for (const PointEval& pt : points) {
        if (pt.cf && pt.reference && *pt.cf * *pt.reference < 0.0) ++sign_disagreements;
    }
    pass = pass && sign_disagreements == 0;
    detail << ", cf/reference sign disagreements " << sign_disagreements;

    std::vector<double> fwhm;
    for (const PointEval& pt : points) {
        if (pt.fwhm) fwhm.push_back(*pt.fwhm);
    }
    bool monotone = fwhm.size() >= 3;
    for (std::size_t i = 0; i + 1 < fwhm.size(); ++i) monotone = monotone && fwhm[i + 1] > fwhm[i];
    pass = pass && monotone;
    detail << ", FWHM over " << fwhm.size() << " spectra "
           << (monotone ? "monotone increasing" : "NOT monotone");

    double best_g2 = 0.0;
    for (const PointEval& pt : points) {
        if (pt.cf && *pt.cf < 0.0 && pt.record.g2) best_g2 = std::max(best_g2, *pt.record.g2);
    }
    pass = pass && best_g2 > 2.0;
    detail << ", max g2 in subradiant window " << fmt(best_g2);

    return {pass, detail.str()};
}

Outcome criterion_fig3() {
    const std::vector<SweepEval>& sweeps = g_presets.get("fig3");
    const SweepEval* g10 = nullptr;
    for (const SweepEval& s : sweeps) {
        if (s.label == "g10") g10 = &s;
    }
    if (!g10) return {false, "no g10 sweep in fig3"};
    const std::vector<PointEval>& points = g10->points;

    // Longest contiguous window with the coherence locked to 1 and the
    // inversion clamped near 1 (transparency for two emitters).
    double window_lo = 0.0, window_hi = 0.0, best_span = 0.0;
    std::size_t i = 0;
    while (i < points.size()) {
        auto locked = [&](const PointEval& pt) {
            return pt.record.g2 && *pt.record.g2 >= 0.9 && *pt.record.g2 <= 1.2 &&
                   std::abs(pt.record.z - 1.0) <= 0.1;
        };
        if (!locked(points[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < points.size() && locked(points[j + 1])) ++j;
        if (points[j].axis / points[i].axis > best_span) {
            best_span = points[j].axis / points[i].axis;
            window_lo = points[i].axis;
            window_hi = points[j].axis;
        }
        i = j + 1;
    }

    double n_max_val = 0.0;
    for (const PointEval& pt : points) n_max_val = std::max(n_max_val, pt.record.n);
    const PointEval& last = points.back();
    const bool quenched = last.record.n < 0.5 * n_max_val && last.record.g2 &&
                          *last.record.g2 >= 1.7 && *last.record.g2 <= 2.1;

    std::ostringstream detail;
    detail << "locked window P in [" << fmt(window_lo) << ", " << fmt(window_hi) << "] (span "
           << fmt(best_span) << "x), peak n " << fmt(n_max_val) << ", final n " << fmt(last.record.n)
           << " g2 " << (last.record.g2 ? fmt(*last.record.g2) : std::string("-"));
    return {best_span >= 10.0 && quenched, detail.str()};
}

Outcome criterion_fig5() {
    const std::vector<SweepEval>& sweeps = g_presets.get("fig5");
    std::ostringstream detail;
    bool pass = true;

    std::vector<double> crossings;
    for (const SweepEval& s : sweeps) {
        if (s.label == "N1") continue;
        const std::optional<double> c = crossing_pump(s.points);
        if (!c) {
            return {false, "no cf sign change in sweep " + s.label};
        }
        crossings.push_back(*c);
    }
    const double c_min = *std::min_element(crossings.begin(), crossings.end());
    const double c_max = *std::max_element(crossings.begin(), crossings.end());
    pass = pass && (c_max / c_min - 1.0) < 0.20;
    detail << "crossings N=2..5 in [" << fmt(c_min) << ", " << fmt(c_max) << "] (spread "
           << fmt(c_max / c_min - 1.0) << ")";

    // Return to independence: |cf| small at P = 20 N Gamma for each N.
    double worst_return = 0.0;
    for (int n = 2; n <= 5; ++n) {
        SystemParams p = sweeps.front().points.front().params;
        p.n_emitters = n;
        p.detunings.clear();
        p.pump = 20.0 * n * p.purcell_rate();
        const tcsim::CooperativityPoint point = tcsim::cooperative_fraction(p);
        if (!point.cf) return {false, "cf undefined at the return-to-independence pump"};
        worst_return = std::max(worst_return, std::abs(*point.cf));
        std::fprintf(stderr, "  [fig5] N=%d P=%.3g cf=%.3g\n", n, p.pump, *point.cf);
    }
    pass = pass && worst_return < 0.05;
    detail << ", worst |cf| at P=20NGamma " << fmt(worst_return);
    return {pass, detail.str()};
}

Outcome criterion_fig4() {
    const std::vector<SweepEval>& sweeps = g_presets.get("fig4");
    const SweepEval* g05 = nullptr;
    for (const SweepEval& s : sweeps) {
        if (s.label == "g0.5") g05 = &s;
    }
    if (!g05) return {false, "no g0.5 sweep in fig4"};
    const std::vector<PointEval>& points = g05->points;

    const PointEval& below = points.front();
    const std::size_t below_peaks = below.peaks.size();

    const PointEval* lasing = nullptr;
    for (const PointEval& pt : points) {
        if (!lasing || pt.record.n > lasing->record.n) lasing = &pt;
    }
    const bool single_peak =
        lasing->peaks.size() == 1 ||
        (lasing->peaks.size() >= 2 && lasing->peaks[0].second > 2.0 * lasing->peaks[1].second);
    const double ratio = (lasing->fwhm && below.fwhm) ? *below.fwhm / *lasing->fwhm : 0.0;

    std::ostringstream detail;
    detail << "below threshold " << below_peaks << " peaks, FWHM " << fmt(below.fwhm.value_or(0.0))
           << "; lasing point P=" << fmt(lasing->axis) << " n=" << fmt(lasing->record.n)
           << (single_peak ? " single dominant peak" : " NO dominant peak") << ", FWHM "
           << fmt(lasing->fwhm.value_or(0.0)) << " (narrowing " << fmt(ratio) << "x)";
    return {below_peaks >= 2 && single_peak && ratio >= 5.0, detail.str()};
}

Outcome criterion_fig7() {
    const std::vector<SweepEval>& sweeps = g_presets.get("fig7");
    const SweepEval* detuning = nullptr;
    const SweepEval* dephasing = nullptr;
    for (const SweepEval& s : sweeps) {
        if (s.label == "detuning") detuning = &s;
        if (s.label == "dephasing") dephasing = &s;
    }
    if (!detuning || !dephasing) return {false, "fig7 sweeps missing"};

    auto cf_values = [](const SweepEval& s) {
        std::vector<double> v;
        for (const PointEval& pt : s.points) {
            if (pt.cf) v.push_back(*pt.cf);
        }
        return v;
    };
    const std::vector<double> cf_delta = cf_values(*detuning);
    const std::vector<double> cf_gamma = cf_values(*dephasing);
    if (cf_delta.size() != detuning->points.size() || cf_gamma.size() != dephasing->points.size()) {
        return {false, "cf undefined at some fig7 point"};
    }

    const std::size_t arg_max =
        static_cast<std::size_t>(std::max_element(cf_delta.begin(), cf_delta.end()) - cf_delta.begin());
    const bool interior_max = arg_max > 0 && arg_max + 1 < cf_delta.size() &&
                              cf_delta[arg_max] > cf_delta.front() &&
                              std::abs(cf_delta.back()) < std::abs(cf_delta[arg_max]);

    auto variation = [](const std::vector<double>& v) {
        const double lo = *std::min_element(v.begin(), v.end());
        const double hi = *std::max_element(v.begin(), v.end());
        return (hi - lo) / std::max(std::abs(hi), std::abs(lo));
    };
    const double var_delta = variation(cf_delta);
    const double var_gamma = variation(cf_gamma);

    std::ostringstream detail;
    detail << "cf(delta) max " << fmt(cf_delta[arg_max]) << " at delta="
           << fmt(detuning->points[arg_max].axis) << " (cf(0) " << fmt(cf_delta.front())
           << ", cf(end) " << fmt(cf_delta.back()) << "), relative variation: detuning "
           << fmt(var_delta) << " vs dephasing " << fmt(var_gamma);
    return {interior_max && var_gamma < var_delta, detail.str()};
}

struct Criterion {
    int id;
    const char* title;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {1, "steady state matches the dense null-space oracle", criterion_steady_oracle},
        {2, "Krylov propagator matches dense scaling-and-squaring", criterion_propagator_oracle},
        {3, "physics invariants hold at every preset point", criterion_invariants},
        {4, "closed-form checks (fixed point, Rabi, weak coupling)", criterion_closed_forms},
        {5, "pump crossover regime (5 emitters, bad cavity)", criterion_fig2},
        {6, "coherence locking and quenching (2 emitters, g=10)", criterion_fig3},
        {7, "threshold universality across emitter number", criterion_fig5},
        {8, "spectral narrowing across the laser threshold", criterion_fig4},
        {9, "cooperativity robustness to detuning and dephasing", criterion_fig7},
    };

    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

    int failures = 0;
    for (const Criterion& c : criteria) {
        if (!selected.empty() &&
            std::find(selected.begin(), selected.end(), c.id) == selected.end()) {
            continue;
        }
        std::fprintf(stderr, "criterion %d: %s...\n", c.id, c.title);
        const double t0 = now_seconds();
        Outcome outcome;
        try {
            outcome = c.run();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        if (!outcome.pass) ++failures;
        std::printf("[%s] criterion %d: %s -- %s (%.1f s)\n", outcome.pass ? "PASS" : "FAIL",
                    c.id, c.title, outcome.detail.c_str(), now_seconds() - t0);
        std::fflush(stdout);
    }
    return failures;
}
