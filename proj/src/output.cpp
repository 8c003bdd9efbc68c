#include "tcsim/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <ostream>

namespace tcsim {

namespace {

using nlohmann::json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt(*v) : "nan"; }

json params_to_json(const SystemParams& p) {
    return json{{"n_emitters", p.n_emitters}, {"g", p.g},
                {"kappa", p.kappa},           {"pump", p.pump},
                {"dephasing", p.dephasing},   {"detunings", p.detunings},
                {"n_max", p.n_max}};
}

SystemParams params_from_json(const json& j) {
    SystemParams p;
    p.n_emitters = j.at("n_emitters").get<int>();
    p.g = j.at("g").get<double>();
    p.kappa = j.at("kappa").get<double>();
    p.pump = j.at("pump").get<double>();
    p.dephasing = j.at("dephasing").get<double>();
    p.detunings = j.at("detunings").get<std::vector<double>>();
    p.n_max = j.at("n_max").get<int>();
    return p;
}

json spec_to_json(const SweepSpec& spec) {
    return json{{"system", params_to_json(spec.base)},
                {"axis", to_string(spec.axis)},
                {"grid", spec.grid},
                {"outputs",
                 json{{"observables", spec.outputs.observables},
                      {"cf", spec.outputs.cf},
                      {"spectrum", spec.outputs.spectrum},
                      {"spectrum_every", spec.outputs.spectrum_every}}}};
}

SweepSpec spec_from_json(const json& j) {
    SweepSpec spec;
    spec.base = params_from_json(j.at("system"));
    spec.axis = sweep_axis_from_string(j.at("axis").get<std::string>());
    spec.grid = j.at("grid").get<std::vector<double>>();
    const json& out = j.at("outputs");
    spec.outputs.observables = out.at("observables").get<bool>();
    spec.outputs.cf = out.at("cf").get<bool>();
    spec.outputs.spectrum = out.at("spectrum").get<bool>();
    spec.outputs.spectrum_every = out.at("spectrum_every").get<int>();
    return spec;
}

std::string results_name(const std::string& label) {
    return label.empty() ? "results.csv" : "results_" + label + ".csv";
}

}  // namespace

void write_results_csv(const std::filesystem::path& path, const SweepSpec& spec,
                       const std::vector<SweepPoint>& points) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << to_string(spec.axis) << ",n,Z,nJ,g2,cf,reference,fwhm,residual,truncation_tail,status\n";
    for (const auto& point : points) {
        out << fmt(point.axis_value) << ',';
        if (point.coop && point.status == "ok") {
            const auto& c = *point.coop;
            out << fmt(c.record.n) << ',' << fmt(c.record.z) << ',' << fmt(c.record.n_j) << ','
                << fmt_opt(c.record.g2) << ',' << fmt_opt(c.cf) << ',' << fmt_opt(c.reference) << ','
                << (point.spectrum ? fmt(point.spectrum->fwhm) : "nan") << ',' << fmt(c.residual)
                << ',' << fmt(c.truncation_tail) << ",ok\n";
        } else {
            out << "nan,nan,nan,nan,nan,nan,nan,nan,nan,\"" << point.status << "\"\n";
        }
    }
}

void write_spectrum_csv(const std::filesystem::path& path, const SpectrumTrace& trace) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << "omega,S\n";
    for (std::size_t i = 0; i < trace.omega.size(); ++i) {
        out << fmt(trace.omega[i]) << ',' << fmt(trace.s[i]) << '\n';
    }
}

void write_manifest(const std::filesystem::path& path, const RunConfig& config,
                    const std::vector<LabeledSweep>& sweeps) {
    json j;
    j["tool"] = "tcsim";
    j["version"] = kVersion;
    json cfg;
    cfg["preset"] = config.preset;
    cfg["out"] = config.out_dir;
    cfg["workers"] = config.workers;
    cfg["svg"] = config.svg;
    if (config.n_max_override) cfg["n_max_override"] = *config.n_max_override;
    if (config.tol_override) cfg["tol_override"] = *config.tol_override;
    if (config.explicit_spec) cfg["explicit"] = spec_to_json(*config.explicit_spec);
    j["config"] = cfg;
    SteadyStateOptions steady;
    if (config.tol_override) steady.tol = *config.tol_override;
    j["tolerances"] = json{{"steady_tol", steady.tol},
                           {"steady_shift", steady.shift},
                           {"steady_krylov_dim", steady.krylov_dim},
                           {"propagator_krylov_dim", PropagatorOptions{}.krylov_dim},
                           {"propagator_step_tol", PropagatorOptions{}.step_tol},
                           {"truncation_threshold", steady.truncation_threshold}};
    json sweep_list = json::array();
    for (const auto& s : sweeps) {
        json entry = spec_to_json(s.spec);
        entry["label"] = s.label;
        entry["results_file"] = results_name(s.label);
        sweep_list.push_back(entry);
    }
    j["sweeps"] = sweep_list;

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
}

RunConfig load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open manifest: " + path.string());
    json j = json::parse(in, nullptr, true, true);
    const json& cfg = j.at("config");
    RunConfig config;
    config.preset = cfg.at("preset").get<std::string>();
    config.out_dir = cfg.at("out").get<std::string>();
    config.workers = cfg.at("workers").get<int>();
    config.svg = cfg.at("svg").get<bool>();
    if (cfg.contains("n_max_override")) config.n_max_override = cfg.at("n_max_override").get<int>();
    if (cfg.contains("tol_override")) config.tol_override = cfg.at("tol_override").get<double>();
    if (cfg.contains("explicit")) config.explicit_spec = spec_from_json(cfg.at("explicit"));
    if (config.preset.empty() && !config.explicit_spec) {
        throw ConfigError("manifest has neither a preset nor an explicit sweep");
    }
    return config;
}

void write_sweep_svg(const std::filesystem::path& path, const SweepSpec& spec,
                     const std::vector<SweepPoint>& points) {
    struct Series {
        const char* name;
        const char* color;
        std::vector<std::pair<double, double>> xy;
    };
    std::vector<Series> series = {{"n", "#1f77b4", {}}, {"cf", "#d62728", {}}, {"reference", "#2ca02c", {}}};
    bool log_x = true;
    for (const auto& p : points) log_x = log_x && p.axis_value > 0.0;
    for (const auto& p : points) {
        if (!p.coop || p.status != "ok") continue;
        const double x = log_x ? std::log10(p.axis_value) : p.axis_value;
        series[0].xy.emplace_back(x, p.coop->record.n);
        if (p.coop->cf) series[1].xy.emplace_back(x, *p.coop->cf);
        if (p.coop->reference) series[2].xy.emplace_back(x, *p.coop->reference);
    }
    double x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
    bool first = true;
    for (const auto& s : series) {
        for (const auto& [x, y] : s.xy) {
            if (first) {
                x_lo = x_hi = x;
                y_lo = y_hi = y;
                first = false;
            }
            x_lo = std::min(x_lo, x);
            x_hi = std::max(x_hi, x);
            y_lo = std::min(y_lo, y);
            y_hi = std::max(y_hi, y);
        }
    }
    if (x_hi - x_lo < 1e-12) x_hi = x_lo + 1.0;
    if (y_hi - y_lo < 1e-12) y_hi = y_lo + 1.0;
    const double width = 720.0, height = 440.0, margin = 50.0;
    auto sx = [&](double x) { return margin + (x - x_lo) / (x_hi - x_lo) * (width - 2 * margin); };
    auto sy = [&](double y) { return height - margin - (y - y_lo) / (y_hi - y_lo) * (height - 2 * margin); };

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (y_lo < 0.0 && y_hi > 0.0) {
        out << "<line x1=\"" << sx(x_lo) << "\" y1=\"" << sy(0.0) << "\" x2=\"" << sx(x_hi)
            << "\" y2=\"" << sy(0.0) << "\" stroke=\"#bbbbbb\" stroke-dasharray=\"4 3\"/>\n";
    }
    double legend_y = margin;
    for (const auto& s : series) {
        if (s.xy.empty()) continue;
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& [x, y] : s.xy) out << sx(x) << ',' << sy(y) << ' ';
        out << "\"/>\n";
        out << "<text x=\"" << width - margin - 80 << "\" y=\"" << legend_y << "\" fill=\"" << s.color
            << "\" font-size=\"13\">" << s.name << "</text>\n";
        legend_y += 16.0;
    }
    out << "<text x=\"" << width / 2 << "\" y=\"" << height - 12 << "\" text-anchor=\"middle\" "
        << "font-size=\"13\">" << (log_x ? "log10 " : "") << to_string(spec.axis) << "</text>\n";
    out << "</svg>\n";
}

int run(const RunConfig& config, std::ostream& log) {
    std::filesystem::create_directories(config.out_dir);
    const std::vector<LabeledSweep> sweeps = resolve_sweeps(config);

    SweepRunOptions options;
    options.workers = config.workers;
    if (config.tol_override) options.steady.tol = *config.tol_override;

    int failures = 0;
    for (const auto& sweep : sweeps) {
        const std::string tag = sweep.label.empty() ? "sweep" : sweep.label;
        options.progress = [&](std::size_t index, const SweepPoint& point) {
            log << "[" << tag << "] point " << (index + 1) << "/" << sweep.spec.grid.size()
                << " axis=" << point.axis_value << " status=" << point.status << '\n';
            log.flush();
        };
        const std::vector<SweepPoint> points = run_sweep(sweep.spec, options);

        const std::filesystem::path out_dir(config.out_dir);
        write_results_csv(out_dir / results_name(sweep.label), sweep.spec, points);
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (points[i].spectrum) {
                std::string name = sweep.label.empty()
                                       ? "spectrum_" + std::to_string(i) + ".csv"
                                       : "spectrum_" + sweep.label + "_" + std::to_string(i) + ".csv";
                write_spectrum_csv(out_dir / name, *points[i].spectrum);
            }
        }
        if (config.svg) {
            std::string name = sweep.label.empty() ? "results.svg" : "results_" + sweep.label + ".svg";
            write_sweep_svg(out_dir / name, sweep.spec, points);
        }
        for (const auto& p : points) {
            if (p.status != "ok") ++failures;
        }
    }
    write_manifest(std::filesystem::path(config.out_dir) / "manifest.json", config, sweeps);
    if (failures > 0) {
        log << "warning: " << failures << " sweep point(s) failed; see status column\n";
    }
    return failures;
}

}  // namespace tcsim
