#pragma once

#include <iostream>
#include <memory>

#include "cutplate/config.hpp"
#include "cutplate/io.hpp"
#include "cutplate/manufactured.hpp"
#include "cutplate/norms.hpp"

namespace cutplate {

// Everything a run assembles before solving. The mesh lives on the heap so
// the context can be moved without invalidating the FESpace back-pointer.
struct RunContext {
    RunConfig config;
    std::unique_ptr<Mesh> mesh;
    MeshQuality quality;
    FaceTopology topo;
    FESpace space;
    std::vector<CutTopology> cuts;
    LinearSystem system;
    SparseMat energy_gram;  // plate + beam energy norms, for diagnostics
    std::vector<std::string> warnings;
};

struct RunArtifacts {
    RunContext context;
    FieldCoefficients solution;
    SolveReport report;
    EnergyNorms norms;
    double max_nodal_deflection = 0.0;
};

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline LoadSpec select_load(const RunConfig& config) {
    switch (config.load_kind) {
        case LoadKind::manufactured: return manufactured_rhs(config.plate);
        case LoadKind::paper_f: return paper_printed_load(config.plate);
        case LoadKind::constant: {
            const double value = config.load_value;
            return {[value](const Vec2&) { return value; }};
        }
    }
    throw ConfigError("unreachable load kind");
}

}  // namespace detail

// Builds mesh, spaces, cut topologies and the superposed constrained system
// for a run configuration. mesh file paths are resolved against base_dir.
inline RunContext build_context(const RunConfig& config, const std::string& base_dir = ".") {
    RunContext ctx;
    ctx.config = config;

    if (config.mesh.kind == MeshSourceKind::structured) {
        ctx.mesh = std::make_unique<Mesh>(generate_structured_unit_square(config.mesh.n));
    } else {
        const auto path = std::filesystem::path(base_dir) / config.mesh.path;
        ctx.mesh = std::make_unique<Mesh>(load_mesh(detail::read_file(path.string())));
    }
    ctx.quality = validate_mesh(*ctx.mesh);
    ctx.topo = build_face_topology(*ctx.mesh);
    ctx.space = build_space(*ctx.mesh, config.degree);

    LinearSystem plate_system;
    plate_system.matrix = assemble_plate_form(ctx.space, ctx.topo, config.plate);
    plate_system.load = assemble_plate_load(ctx.space, detail::select_load(config));
    ctx.energy_gram = plate_energy_gram(ctx.space, ctx.topo, config.plate);

    std::vector<SparseMat> beam_matrices;
    std::vector<Eigen::VectorXd> beam_loads;
    double max_section = 0.0;
    for (std::size_t b = 0; b < config.beams.size(); ++b) {
        const BeamSpec& beam = config.beams[b];
        ctx.cuts.push_back(compute_cut_topology(*ctx.mesh, ctx.topo, beam.p0, beam.p1));
        SparseMat m = assemble_beam_form(ctx.space, ctx.topo, ctx.cuts.back(), beam);
        if (beam.gamma1 > 0.0 || beam.gamma2 > 0.0)
            m += assemble_beam_stabilization(ctx.space, ctx.topo, ctx.cuts.back(), beam);
        m += assemble_beam_endpoint_terms(ctx.space, ctx.topo, beam);
        beam_matrices.push_back(std::move(m));
        beam_loads.push_back(assemble_beam_load(ctx.space, ctx.cuts.back(), beam));
        ctx.energy_gram += beam_energy_gram(ctx.space, ctx.topo, ctx.cuts.back(), beam);
        max_section = std::max({max_section, beam.thickness, beam.width});
    }
    max_section = std::max(max_section, config.plate.thickness);
    if (!config.beams.empty() && ctx.topo.mesh_size < max_section)
        ctx.warnings.push_back(
            "warning: mesh size h < max(plate thickness, beam thickness, beam width); "
            "thin-structure assumption violated, uniform stability not guaranteed");

    ctx.system = superpose(plate_system, beam_matrices, beam_loads);
    apply_plate_bc(ctx.system, ctx.space, ctx.topo, config.plate.bc);
    return ctx;
}

// Runs a configuration end to end; optionally writes solution.vtk,
// solution.csv and report.txt into the configured output directory.
inline RunArtifacts run(const RunConfig& config, const std::string& base_dir = ".",
                        bool write_outputs = true) {
    RunArtifacts artifacts{build_context(config, base_dir), {}, {}, {}, 0.0};
    RunContext& ctx = artifacts.context;
    for (const std::string& w : ctx.warnings) std::cerr << w << "\n";

    auto [solution, report] = solve(ctx.system, config.solver);
    if (config.positivity_samples > 0)
        report.min_rayleigh = positivity_diagnostic(ctx.system, ctx.energy_gram,
                                                    config.positivity_samples, config.seed);
    artifacts.solution = std::move(solution);
    artifacts.report = report;
    artifacts.norms = energy_norms(ctx.space, ctx.topo, config.plate, ctx.cuts, config.beams,
                                   artifacts.solution);
    artifacts.max_nodal_deflection = artifacts.solution.cwiseAbs().maxCoeff();

    if (write_outputs) {
        const auto out = std::filesystem::path(config.out_dir);
        export_vtk(ctx.space, artifacts.solution, (out / "solution.vtk").string());
        export_solution_csv(ctx.space, artifacts.solution, (out / "solution.csv").string());
        std::vector<std::string> extra;
        std::ostringstream line;
        line << std::setprecision(12) << "max_nodal_deflection = "
             << artifacts.max_nodal_deflection << "\nmesh_size = " << ctx.topo.mesh_size
             << "\nmesh_max_radius_ratio = " << ctx.quality.max_radius_ratio;
        extra.push_back(line.str());
        for (const std::string& w : ctx.warnings) extra.push_back("# " + w);
        write_report(artifacts.report, artifacts.norms, extra, (out / "report.txt").string());
    }
    return artifacts;
}

// Manufactured-solution refinement study on structured meshes: clamped plate,
// load derived from the quartic bubble, L2 and plate-energy errors with
// observed rates.
inline RateTable convergence_study(const RunConfig& base, const std::vector<int>& n_list) {
    if (base.plate.bc != PlateBC::clamped)
        throw ConfigError("convergence_study requires a clamped plate");
    if (base.load_kind != LoadKind::manufactured)
        throw ConfigError("convergence_study requires the manufactured load");

    RateTable table;
    table.columns = {"n", "h", "l2_error", "energy_error", "l2_rate", "energy_rate"};
    const AnalyticField exact = quartic_bubble();
    const double nan = std::numeric_limits<double>::quiet_NaN();

    for (const int n : n_list) {
        RunConfig config = base;
        config.mesh.kind = MeshSourceKind::structured;
        config.mesh.n = n;
        config.beams.clear();
        config.beam_loads.clear();
        auto artifacts = run(config, ".", false);
        const auto& ctx = artifacts.context;
        const ErrorNorms err =
            error_norms(ctx.space, ctx.topo, config.plate, artifacts.solution, exact);
        const double h = ctx.mesh->max_diameter();

        double l2_rate = nan, energy_rate = nan;
        if (!table.rows.empty()) {
            const auto& prev = table.rows.back();
            const double ratio = std::log(prev[1] / h);
            l2_rate = std::log(prev[2] / err.l2) / ratio;
            energy_rate = std::log(prev[3] / err.energy) / ratio;
        }
        table.rows.push_back({static_cast<double>(n), h, err.l2, err.energy, l2_rate,
                              energy_rate});
    }
    return table;
}

struct BeamStudyOptions {
    Vec2 p0 = Vec2(0.499, 0.0);
    Vec2 p1 = Vec2(0.499, 1.0);
    double youngs_modulus = 1.0e4;
    double width = 0.1;
    double thickness = 0.1;
    double beta0 = 16.0;
    double beta_tilde0 = 100.0;
    SolveOptions solver;
};

struct BeamStudyResult {
    RateTable table;
    double midpoint = 0.0;  // finest mesh
    double exact = 0.0;     // q L^4 / (384 E I)
};

// Single stabilized cut beam with no plate stiffness: both ends clamped,
// a_Sigma f_Sigma = 1. DOFs without support on the active mesh are fixed to
// zero; the remaining system is solvable only thanks to the stabilization.
inline BeamStudyResult standalone_beam_study(const std::vector<int>& n_list, double gamma,
                                             const BeamStudyOptions& options = {}) {
    BeamStudyResult result;
    result.table.columns = {"n", "h", "midpoint", "exact", "rel_error", "rate"};
    const double nan = std::numeric_limits<double>::quiet_NaN();

    BeamSpec beam;
    beam.p0 = options.p0;
    beam.p1 = options.p1;
    beam.youngs_modulus = options.youngs_modulus;
    beam.width = options.width;
    beam.thickness = options.thickness;
    beam.end0 = beam.end1 = BeamEndCondition::clamped;
    beam.beta0 = options.beta0;
    beam.beta_tilde0 = options.beta_tilde0;
    beam.gamma1 = beam.gamma2 = gamma;
    const BeamConstants constants = beam_constants(beam);
    beam.line_load = [&constants](const Vec2&) { return 1.0 / constants.area; };  // a f = 1

    const double span = (beam.p1 - beam.p0).norm();
    result.exact = std::pow(span, 4) / (384.0 * constants.stiffness);

    for (const int n : n_list) {
        const Mesh mesh = generate_structured_unit_square(n);
        const FaceTopology topo = build_face_topology(mesh);
        const FESpace space = build_space(mesh, 2);
        const CutTopology cut = compute_cut_topology(mesh, topo, beam.p0, beam.p1);

        LinearSystem system;
        system.matrix = assemble_beam_form(space, topo, cut, beam);
        if (gamma > 0.0) system.matrix += assemble_beam_stabilization(space, topo, cut, beam);
        system.matrix += assemble_beam_endpoint_terms(space, topo, beam);
        system.load = assemble_beam_load(space, cut, beam);

        // restrict to the active mesh: every DOF without active support is fixed
        std::vector<signed char> active(space.n_dofs, 0);
        for (const int t : cut.active_elements)
            for (const int dof : space.dofs(t)) active[dof] = 1;
        for (int dof = 0; dof < space.n_dofs; ++dof)
            if (!active[dof]) system.constraints.push_back({dof, 0.0});

        auto [solution, report] = solve(system, options.solver);
        (void)report;
        const Vec2 mid = 0.5 * (beam.p0 + beam.p1);
        result.midpoint = evaluate_field(space, solution, mid).value;

        const double h = mesh.max_diameter();
        const double rel = std::abs(result.midpoint - result.exact) / result.exact;
        double rate = nan;
        if (!result.table.rows.empty()) {
            const auto& prev = result.table.rows.back();
            rate = std::log(prev[4] / rel) / std::log(prev[1] / h);
        }
        result.table.rows.push_back(
            {static_cast<double>(n), h, result.midpoint, result.exact, rel, rate});
    }
    return result;
}

}  // namespace cutplate
