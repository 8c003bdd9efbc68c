#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "tcsim/output.hpp"

namespace {

bool looks_like_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    char c = 0;
    while (in.get(c)) {
        if (!std::isspace(static_cast<unsigned char>(c))) return c == '{';
    }
    return false;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Steady-state simulator for incoherently pumped emitters in a lossy cavity"};

    std::string config_path;
    std::string out_dir;
    std::string preset;
    int workers = 0;
    app.add_option("--config", config_path, "Config file (or a manifest.json from a previous run)");
    app.add_option("--out", out_dir, "Output directory (overrides the config)");
    app.add_option("--workers", workers, "Worker count for sweep points (0 = all cores)");
    app.add_option("--preset", preset,
                   "Run a named preset directly: fig2, fig3, fig4, fig5, fig6, fig7");
    CLI11_PARSE(app, argc, argv);

    try {
        tcsim::RunConfig config;
        if (!config_path.empty() && !preset.empty()) {
            std::cerr << "error: give either --config or --preset, not both\n";
            return 1;
        }
        if (!config_path.empty()) {
            config = looks_like_json(config_path) ? tcsim::load_manifest(config_path)
                                                  : tcsim::parse_config_file(config_path);
        } else if (!preset.empty()) {
            tcsim::preset_sweeps(preset);  // validates the name
            config.preset = preset;
        } else {
            std::cerr << "error: one of --config or --preset is required\n";
            return 1;
        }
        if (!out_dir.empty()) config.out_dir = out_dir;
        if (workers > 0) config.workers = workers;

        tcsim::run(config, std::cout);
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
