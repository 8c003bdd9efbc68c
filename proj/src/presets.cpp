#include <cmath>
#include <sstream>

#include "tcsim/config.hpp"

namespace tcsim {

namespace {

SystemParams tavis_cummings(int n_emitters, double g, int n_max) {
    SystemParams p;
    p.n_emitters = n_emitters;
    p.g = g;
    p.kappa = 1.0;
    p.n_max = n_max;
    return p;
}

std::string format_g(double g) {
    std::ostringstream s;
    s << "g" << g;
    return s.str();
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"fig2", "fig3", "fig4", "fig5", "fig6", "fig7"};
}

std::vector<LabeledSweep> preset_sweeps(const std::string& name) {
    std::vector<LabeledSweep> sweeps;

    if (name == "fig2") {
        // 5 emitters in the bad cavity regime, pump sweep across
        // the subradiant / superradiant / independent windows.
        SweepSpec spec;
        spec.base = tavis_cummings(5, 0.1, 12);
        spec.axis = SweepAxis::pump;
        spec.grid = log_grid(1e-3, 10.0, 40);
        spec.outputs.spectrum = true;
        spec.outputs.spectrum_every = 8;
        sweeps.push_back({"", spec});
    } else if (name == "fig3") {
        // Superradiance-lasing crossover for 2 emitters, one sweep per coupling.
        const double couplings[] = {0.01, 0.1, 1.0, 5.0, 10.0};
        const int truncations[] = {6, 8, 24, 100, 300};
        for (int i = 0; i < 5; ++i) {
            const double g = couplings[i];
            SweepSpec spec;
            spec.base = tavis_cummings(2, g, truncations[i]);
            spec.axis = SweepAxis::pump;
            // At strong coupling the coherence locks well below 0.05 Gamma,
            // so the lower bound is capped to keep that window in view.
            const double gamma = spec.base.purcell_rate();
            spec.grid = log_grid(std::min(0.05 * gamma, 2.0), 500.0 * std::max(gamma, 1.0), 40);
            sweeps.push_back({format_g(g), spec});
        }
    } else if (name == "fig4") {
        // Spectral signature of the crossover for 4 emitters.
        const double couplings[] = {0.2, 0.5};
        for (double g : couplings) {
            SweepSpec spec;
            spec.base = tavis_cummings(4, g, 16);
            spec.axis = SweepAxis::pump;
            spec.grid = log_grid(0.02, 20.0, 9);
            spec.outputs.spectrum = true;
            spec.outputs.spectrum_every = 1;
            sweeps.push_back({format_g(g), spec});
        }
    } else if (name == "fig5") {
        // Bad cavity regime, growing emitter number; threshold universality.
        for (int n = 1; n <= 5; ++n) {
            SweepSpec spec;
            spec.base = tavis_cummings(n, 0.3, 14);
            spec.axis = SweepAxis::pump;
            const double gamma = spec.base.purcell_rate();  // 0.36
            spec.grid = log_grid(0.05 * gamma, 25.0 * 5 * gamma, 32);
            std::ostringstream label;
            label << "N" << n;
            sweeps.push_back({label.str(), spec});
        }
    } else if (name == "fig6") {
        // Strong coupling, N = 1..3, full observable panel.  The photon number
        // peaks near N * 50 in the lasing window, so the truncation grows with N.
        const int truncations[] = {60, 100, 170};
        for (int n = 1; n <= 3; ++n) {
            SweepSpec spec;
            spec.base = tavis_cummings(n, 5.0, truncations[n - 1]);
            spec.axis = SweepAxis::pump;
            spec.grid = log_grid(0.05, 2000.0, 32);
            std::ostringstream label;
            label << "N" << n;
            sweeps.push_back({label.str(), spec});
        }
    } else if (name == "fig7") {
        // Robustness of cooperativity against inhomogeneous broadening and
        // pure dephasing, 2 strongly coupled emitters at fixed pump.
        SweepSpec detuning;
        detuning.base = tavis_cummings(2, 5.0, 60);
        detuning.base.pump = 20.0;
        detuning.axis = SweepAxis::detuning_symmetric;
        detuning.grid = linear_grid(0.0, 40.0, 17);
        sweeps.push_back({"detuning", detuning});

        SweepSpec dephasing = detuning;
        dephasing.axis = SweepAxis::dephasing;
        sweeps.push_back({"dephasing", dephasing});
    } else {
        throw ConfigError("unknown preset \"" + name + "\"");
    }
    return sweeps;
}

}  // namespace tcsim
