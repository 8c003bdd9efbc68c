#include "tcsim/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace tcsim {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\''))) {
        return s.substr(1, s.size() - 2);
    }
    return s;
}

struct Entry {
    std::string value;
    int line;
};

struct ParsedFile {
    // keys are "key" for top level and "section.key" inside sections
    std::map<std::string, Entry> entries;
};

ParsedFile tokenize(const std::string& text) {
    ParsedFile out;
    std::istringstream stream(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("line " + std::to_string(line_no) + ": unterminated section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) {
                throw ConfigError("line " + std::to_string(line_no) + ": empty section name");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        const std::string full = section.empty() ? key : section + "." + key;
        if (out.entries.count(full)) {
            throw ConfigError("line " + std::to_string(line_no) + ": duplicate key \"" + full + "\"");
        }
        out.entries[full] = Entry{value, line_no};
    }
    return out;
}

double parse_number(const Entry& e, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(e.value, &pos);
        if (pos != e.value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(e.line) + ": field \"" + key +
                          "\" expects a number, got \"" + e.value + "\"");
    }
}

int parse_int(const Entry& e, const std::string& key) {
    const double v = parse_number(e, key);
    const int i = static_cast<int>(std::lround(v));
    if (std::abs(v - i) > 1e-12) {
        throw ConfigError("line " + std::to_string(e.line) + ": field \"" + key + "\" expects an integer");
    }
    return i;
}

bool parse_bool(const Entry& e, const std::string& key) {
    if (e.value == "true") return true;
    if (e.value == "false") return false;
    throw ConfigError("line " + std::to_string(e.line) + ": field \"" + key + "\" expects true/false");
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> parts;
    std::string current;
    int depth = 0;
    for (char c : s) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == ',' && depth == 0) {
            parts.push_back(trim(current));
            current.clear();
        } else {
            current += c;
        }
    }
    if (!trim(current).empty()) parts.push_back(trim(current));
    return parts;
}

std::vector<double> parse_grid(const Entry& e, const std::string& key) {
    const std::string v = e.value;
    auto parse_range = [&](const std::string& fn, auto maker) -> std::vector<double> {
        const std::string inner = v.substr(fn.size() + 1, v.size() - fn.size() - 2);
        const auto parts = split_commas(inner);
        if (parts.size() != 3) {
            throw ConfigError("line " + std::to_string(e.line) + ": " + fn +
                              " grid expects (lo, hi, points)");
        }
        try {
            return maker(std::stod(parts[0]), std::stod(parts[1]), std::stoi(parts[2]));
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& ex) {
            throw ConfigError("line " + std::to_string(e.line) + ": bad " + fn + " grid: " + ex.what());
        }
    };
    if (v.rfind("log(", 0) == 0 && v.back() == ')') {
        return parse_range("log", [](double lo, double hi, int n) { return log_grid(lo, hi, n); });
    }
    if (v.rfind("linear(", 0) == 0 && v.back() == ')') {
        return parse_range("linear", [](double lo, double hi, int n) { return linear_grid(lo, hi, n); });
    }
    std::vector<double> grid;
    for (const auto& part : split_commas(v)) {
        grid.push_back(parse_number(Entry{part, e.line}, key));
    }
    if (grid.empty()) {
        throw ConfigError("line " + std::to_string(e.line) + ": field \"" + key + "\" expects a grid");
    }
    return grid;
}

const std::vector<std::string> kTopKeys = {"preset", "out", "workers", "svg", "n_max", "tol"};
const std::vector<std::string> kSystemKeys = {"n_emitters", "g",          "kappa", "pump",
                                              "dephasing",  "detunings", "n_max"};
const std::vector<std::string> kSweepKeys = {"axis", "grid", "outputs", "spectrum_every"};

}  // namespace

RunConfig parse_config(const std::string& text) {
    const ParsedFile file = tokenize(text);
    RunConfig config;

    for (const auto& [full_key, entry] : file.entries) {
        const auto dot = full_key.find('.');
        const std::string section = dot == std::string::npos ? "" : full_key.substr(0, dot);
        const std::string key = dot == std::string::npos ? full_key : full_key.substr(dot + 1);
        const std::vector<std::string>* allowed = nullptr;
        if (section.empty()) {
            allowed = &kTopKeys;
        } else if (section == "system") {
            allowed = &kSystemKeys;
        } else if (section == "sweep") {
            allowed = &kSweepKeys;
        } else {
            throw ConfigError("line " + std::to_string(entry.line) + ": unknown section \"" + section +
                              "\"");
        }
        if (std::find(allowed->begin(), allowed->end(), key) == allowed->end()) {
            throw ConfigError("line " + std::to_string(entry.line) + ": unknown key \"" + full_key +
                              "\"");
        }
    }

    auto get = [&](const std::string& key) -> const Entry* {
        auto it = file.entries.find(key);
        return it == file.entries.end() ? nullptr : &it->second;
    };

    if (const Entry* e = get("preset")) config.preset = unquote(e->value);
    if (const Entry* e = get("out")) config.out_dir = unquote(e->value);
    if (const Entry* e = get("workers")) config.workers = parse_int(*e, "workers");
    if (const Entry* e = get("svg")) config.svg = parse_bool(*e, "svg");
    if (const Entry* e = get("n_max")) config.n_max_override = parse_int(*e, "n_max");
    if (const Entry* e = get("tol")) config.tol_override = parse_number(*e, "tol");

    const bool has_system =
        std::any_of(file.entries.begin(), file.entries.end(),
                    [](const auto& kv) { return kv.first.rfind("system.", 0) == 0; });
    const bool has_sweep =
        std::any_of(file.entries.begin(), file.entries.end(),
                    [](const auto& kv) { return kv.first.rfind("sweep.", 0) == 0; });

    if (!config.preset.empty() && (has_system || has_sweep)) {
        throw ConfigError("config must give either a preset or an explicit [system]/[sweep], not both");
    }
    if (config.preset.empty() && !(has_system && has_sweep)) {
        throw ConfigError("config must give a preset or both [system] and [sweep] sections");
    }

    if (config.preset.empty()) {
        SweepSpec spec;
        if (const Entry* e = get("system.n_emitters")) spec.base.n_emitters = parse_int(*e, "n_emitters");
        if (const Entry* e = get("system.g")) spec.base.g = parse_number(*e, "g");
        if (const Entry* e = get("system.kappa")) spec.base.kappa = parse_number(*e, "kappa");
        if (const Entry* e = get("system.pump")) spec.base.pump = parse_number(*e, "pump");
        if (const Entry* e = get("system.dephasing")) spec.base.dephasing = parse_number(*e, "dephasing");
        if (const Entry* e = get("system.n_max")) spec.base.n_max = parse_int(*e, "n_max");
        if (const Entry* e = get("system.detunings")) {
            spec.base.detunings.clear();
            for (const auto& part : split_commas(e->value)) {
                spec.base.detunings.push_back(parse_number(Entry{part, e->line}, "detunings"));
            }
        }
        const Entry* axis = get("sweep.axis");
        const Entry* grid = get("sweep.grid");
        if (!axis || !grid) throw ConfigError("[sweep] requires both \"axis\" and \"grid\"");
        try {
            spec.axis = sweep_axis_from_string(unquote(axis->value));
        } catch (const std::exception& e) {
            throw ConfigError("line " + std::to_string(axis->line) + ": " + e.what());
        }
        spec.grid = parse_grid(*grid, "grid");
        if (const Entry* e = get("sweep.outputs")) {
            spec.outputs = SweepOutputs{false, false, false, 1};
            for (const auto& part : split_commas(unquote(e->value))) {
                if (part == "observables") {
                    spec.outputs.observables = true;
                } else if (part == "cf") {
                    spec.outputs.cf = true;
                } else if (part == "spectrum") {
                    spec.outputs.spectrum = true;
                } else {
                    throw ConfigError("line " + std::to_string(e->line) + ": unknown output \"" + part +
                                      "\"");
                }
            }
        }
        if (const Entry* e = get("sweep.spectrum_every")) {
            spec.outputs.spectrum_every = parse_int(*e, "spectrum_every");
        }
        try {
            spec.validate();
        } catch (const std::exception& e) {
            throw ConfigError(std::string("invalid sweep: ") + e.what());
        }
        config.explicit_spec = std::move(spec);
    } else {
        preset_sweeps(config.preset);  // rejects unknown preset names early
    }
    return config;
}

RunConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

std::vector<LabeledSweep> resolve_sweeps(const RunConfig& config) {
    std::vector<LabeledSweep> sweeps;
    if (!config.preset.empty()) {
        sweeps = preset_sweeps(config.preset);
    } else {
        sweeps.push_back(LabeledSweep{"", *config.explicit_spec});
    }
    if (config.n_max_override) {
        for (auto& s : sweeps) s.spec.base.n_max = *config.n_max_override;
    }
    return sweeps;
}

}  // namespace tcsim
