#pragma once

// Project configuration: geometry and fit defaults plus named dielectric
// presets, loadable from a flat "key = value" text file. Every value can be
// overridden by a CLI flag; unknown keys are rejected. The CPWQ_CONFIG
// environment variable names a default config file.

#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "../cpw.hpp"
#include "../errors.hpp"
#include "../loss.hpp"
#include "../reference.hpp"
#include "csv.hpp"

namespace cpwq::io {

struct ProjectConfig {
    CpwGeometry cpw;
    BridgeGeometry bridge;
    double resonance_freq = 6e9; // Hz
    double coupling_q = 7e5;

    // Named lossy-layer presets; SiO2 and AlOx are always present.
    std::map<std::string, DielectricSpec> dielectric_presets;

    int fit_max_iterations = 200;
    double fit_step_tolerance = 1e-10;

    std::filesystem::path output_dir = "out";

    static ProjectConfig defaults() {
        ProjectConfig c;
        // Scaffold residue candidate: SiO2, 100 nm scale. Native aluminum
        // oxide: 3 nm.
        c.dielectric_presets["SiO2"] =
            DielectricSpec{100e-9, 4.0, reference::amorphous_oxide_loss_tangent};
        c.dielectric_presets["AlOx"] =
            DielectricSpec{3e-9, 10.0, reference::amorphous_oxide_loss_tangent};
        return c;
    }

    void validate() const {
        cpw.validate();
        bridge.validate();
        check_positive(resonance_freq, "resonance_freq");
        check_positive(coupling_q, "coupling_q");
        if (!dielectric_presets.count("SiO2") || !dielectric_presets.count("AlOx"))
            throw std::domain_error(
                "dielectric presets must include SiO2 and AlOx");
        for (const auto& [name, spec] : dielectric_presets) spec.validate();
        if (fit_max_iterations < 1)
            throw std::domain_error("fit_max_iterations must be >= 1");
        check_positive(fit_step_tolerance, "fit_step_tolerance");
    }

    ResonatorDesign resonator(int bridge_count = 0) const {
        ResonatorDesign d;
        d.geometry = cpw;
        d.resonance_freq = resonance_freq;
        d.coupling_q = coupling_q;
        d.bridge_count = bridge_count;
        d.bridge = bridge;
        return d;
    }
};

// key = value lines, '#' comments, blank lines ignored.
// Preset fields use preset_<Name>_{thickness_nm,rel_permittivity,loss_tangent}.
inline ProjectConfig load_config(const std::filesystem::path& path) {
    ProjectConfig c = ProjectConfig::defaults();
    const auto lines = detail::read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        std::string line = lines[i];
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw parse_error("expected key = value", line_no);
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw parse_error("expected key = value", line_no);

        const auto num = [&] { return detail::parse_number(value, line_no); };
        if (key == "center_width_um") c.cpw.center_width = num() * 1e-6;
        else if (key == "gap_um") c.cpw.gap = num() * 1e-6;
        else if (key == "substrate_rel_permittivity") c.cpw.substrate_rel_permittivity = num();
        else if (key == "film") c.cpw.film = value;
        else if (key == "bridge_span_um") c.bridge.span_width = num() * 1e-6;
        else if (key == "bridge_width_um") c.bridge.bridge_width = num() * 1e-6;
        else if (key == "bridge_height_um") c.bridge.height = num() * 1e-6;
        else if (key == "resonance_freq_ghz") c.resonance_freq = num() * 1e9;
        else if (key == "coupling_q") c.coupling_q = num();
        else if (key == "fit_max_iterations") c.fit_max_iterations = static_cast<int>(num());
        else if (key == "fit_step_tolerance") c.fit_step_tolerance = num();
        else if (key == "output_dir") c.output_dir = value;
        else if (key.rfind("preset_", 0) == 0) {
            const std::string rest = key.substr(7);
            auto field_of = [&](const std::string& suffix) -> std::optional<std::string> {
                if (rest.size() > suffix.size() + 1 &&
                    rest.compare(rest.size() - suffix.size(), suffix.size(), suffix) == 0 &&
                    rest[rest.size() - suffix.size() - 1] == '_')
                    return rest.substr(0, rest.size() - suffix.size() - 1);
                return std::nullopt;
            };
            if (auto name = field_of("thickness_nm"))
                c.dielectric_presets[*name].thickness = num() * 1e-9;
            else if (auto name2 = field_of("rel_permittivity"))
                c.dielectric_presets[*name2].rel_permittivity = num();
            else if (auto name3 = field_of("loss_tangent"))
                c.dielectric_presets[*name3].loss_tangent = num();
            else
                throw parse_error("unknown preset field in key '" + key + "'",
                                  line_no);
        } else {
            throw parse_error("unknown key '" + key + "'", line_no);
        }
    }
    c.validate();
    return c;
}

// Loads the file named by CPWQ_CONFIG when set, otherwise built-in defaults.
inline ProjectConfig config_from_env_or_default() {
    if (const char* env = std::getenv("CPWQ_CONFIG"))
        if (*env) return load_config(env);
    return ProjectConfig::defaults();
}

} // namespace cpwq::io
