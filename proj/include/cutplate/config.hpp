#pragma once

#include <optional>
#include <string>

#include "cutplate/beam.hpp"
#include "cutplate/plate.hpp"

namespace cutplate {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class MeshSourceKind { structured, file };
enum class LoadKind { manufactured, paper_f, constant };

struct MeshSource {
    MeshSourceKind kind = MeshSourceKind::structured;
    int n = 16;
    std::string path;  // for kind == file, resolved against the config directory
};

// Full description of one solver run. Parsed from the key = value format
// documented in the README; every key has a default, unknown keys are
// rejected.
struct RunConfig {
    MeshSource mesh;
    int degree = 2;
    PlateSpec plate;
    LoadKind load_kind = LoadKind::manufactured;
    double load_value = 0.0;                  // for load_kind == constant
    std::vector<BeamSpec> beams;
    std::vector<double> beam_loads;           // constant f_Sigma per beam
    SolveOptions solver;
    std::string out_dir = "out";
    int positivity_samples = 0;
    std::uint32_t seed = 0;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

inline double parse_number(const std::string& value, int lineno) {
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(value, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != value.size())
        throw ConfigError("config line " + std::to_string(lineno) + ": invalid number '" +
                          value + "'");
    return out;
}

}  // namespace detail

inline RunConfig parse_config(const std::string& text) {
    RunConfig config;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;

    const auto fail = [&](const std::string& what) {
        throw ConfigError("config line " + std::to_string(lineno) + ": " + what);
    };

    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') fail("malformed section header");
            section = detail::trim(line.substr(1, line.size() - 2));
            if (section == "beam") {
                config.beams.emplace_back();
                config.beam_loads.push_back(0.0);
            } else if (section != "mesh" && section != "space" && section != "plate" &&
                       section != "load" && section != "solver" && section != "output" &&
                       section != "diagnostics") {
                fail("unknown section [" + section + "]");
            }
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos) fail("expected 'key = value'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) fail("expected 'key = value'");
        const auto num = [&] { return detail::parse_number(value, lineno); };

        if (section == "mesh") {
            if (key == "source") {
                if (value == "structured")
                    config.mesh.kind = MeshSourceKind::structured;
                else if (value == "file")
                    config.mesh.kind = MeshSourceKind::file;
                else
                    fail("mesh source must be structured|file");
            } else if (key == "n") {
                config.mesh.n = static_cast<int>(num());
            } else if (key == "file") {
                config.mesh.path = value;
            } else
                fail("unknown key '" + key + "' in [mesh]");
        } else if (section == "space") {
            if (key == "degree")
                config.degree = static_cast<int>(num());
            else
                fail("unknown key '" + key + "' in [space]");
        } else if (section == "plate") {
            if (key == "E")
                config.plate.youngs_modulus = num();
            else if (key == "nu")
                config.plate.poisson = num();
            else if (key == "thickness")
                config.plate.thickness = num();
            else if (key == "beta0")
                config.plate.beta0 = num();
            else if (key == "bc") {
                if (value == "clamped")
                    config.plate.bc = PlateBC::clamped;
                else if (value == "simply_supported")
                    config.plate.bc = PlateBC::simply_supported;
                else if (value == "free")
                    config.plate.bc = PlateBC::free_edge;
                else
                    fail("plate bc must be clamped|simply_supported|free");
            } else
                fail("unknown key '" + key + "' in [plate]");
        } else if (section == "load") {
            if (key == "kind") {
                if (value == "manufactured")
                    config.load_kind = LoadKind::manufactured;
                else if (value == "paper_f")
                    config.load_kind = LoadKind::paper_f;
                else if (value == "constant")
                    config.load_kind = LoadKind::constant;
                else
                    fail("load kind must be manufactured|paper_f|constant");
            } else if (key == "value") {
                config.load_value = num();
            } else
                fail("unknown key '" + key + "' in [load]");
        } else if (section == "solver") {
            if (key == "method") {
                if (value == "direct")
                    config.solver.method = SolverKind::direct;
                else if (value == "cg")
                    config.solver.method = SolverKind::cg;
                else
                    fail("solver method must be direct|cg");
            } else if (key == "tol")
                config.solver.tol = num();
            else if (key == "max_iterations")
                config.solver.max_iterations = static_cast<int>(num());
            else
                fail("unknown key '" + key + "' in [solver]");
        } else if (section == "output") {
            if (key == "directory")
                config.out_dir = value;
            else
                fail("unknown key '" + key + "' in [output]");
        } else if (section == "diagnostics") {
            if (key == "positivity_samples")
                config.positivity_samples = static_cast<int>(num());
            else if (key == "seed")
                config.seed = static_cast<std::uint32_t>(num());
            else
                fail("unknown key '" + key + "' in [diagnostics]");
        } else if (section == "beam") {
            BeamSpec& beam = config.beams.back();
            if (key == "x0")
                beam.p0.x() = num();
            else if (key == "y0")
                beam.p0.y() = num();
            else if (key == "x1")
                beam.p1.x() = num();
            else if (key == "y1")
                beam.p1.y() = num();
            else if (key == "E")
                beam.youngs_modulus = num();
            else if (key == "width")
                beam.width = num();
            else if (key == "thickness")
                beam.thickness = num();
            else if (key == "plate_thickness")
                beam.plate_thickness = num();
            else if (key == "cross_section") {
                if (value == "standard")
                    beam.cross_section = BeamCrossSection::standard;
                else if (value == "dual_layer")
                    beam.cross_section = BeamCrossSection::dual_layer;
                else
                    fail("cross_section must be standard|dual_layer");
            } else if (key == "end0" || key == "end1") {
                BeamEndCondition cond = BeamEndCondition::free_end;
                if (value == "simply_supported")
                    cond = BeamEndCondition::simply_supported;
                else if (value == "clamped")
                    cond = BeamEndCondition::clamped;
                else if (value != "free")
                    fail("end condition must be free|simply_supported|clamped");
                (key == "end0" ? beam.end0 : beam.end1) = cond;
            } else if (key == "beta0")
                beam.beta0 = num();
            else if (key == "beta_tilde0")
                beam.beta_tilde0 = num();
            else if (key == "gamma1")
                beam.gamma1 = num();
            else if (key == "gamma2")
                beam.gamma2 = num();
            else if (key == "load")
                config.beam_loads.back() = num();
            else
                fail("unknown key '" + key + "' in [beam]");
        } else {
            fail("key outside of any section");
        }
    }

    if (config.degree < 2) throw ConfigError("config: space degree must be >= 2");
    if (config.mesh.kind == MeshSourceKind::structured && config.mesh.n < 1)
        throw ConfigError("config: structured mesh needs n >= 1");
    if (config.mesh.kind == MeshSourceKind::file && config.mesh.path.empty())
        throw ConfigError("config: mesh source 'file' needs a file path");
    try {
        config.plate.validate();
        for (std::size_t b = 0; b < config.beams.size(); ++b) {
            if (config.beam_loads[b] != 0.0) {
                const double value = config.beam_loads[b];
                config.beams[b].line_load = [value](const Vec2&) { return value; };
            }
            config.beams[b].validate();
        }
    } catch (const FemError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return config;
}

}  // namespace cutplate
