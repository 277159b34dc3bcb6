#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>

#include "cutplate/fe_space.hpp"
#include "cutplate/norms.hpp"
#include "cutplate/system.hpp"

namespace cutplate {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Generic numeric table with named columns; empty cells are NaN and are
// written as empty CSV fields.
struct RateTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

namespace detail {

inline std::ofstream open_out(const std::string& path) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << std::setprecision(12);
    return out;
}

}  // namespace detail

// Legacy ASCII VTK unstructured grid with the point scalar "deflection".
// Degree-2 spaces are written as quadratic triangles (cell type 22, corner
// nodes then edge nodes); higher degrees fall back to linear triangles on the
// vertices.
inline void export_vtk(const FESpace& space, const FieldCoefficients& coeffs,
                       const std::string& path) {
    const Mesh& mesh = *space.mesh;
    auto out = detail::open_out(path);
    out << "# vtk DataFile Version 3.0\n"
        << "cutplate deflection field\n"
        << "ASCII\n"
        << "DATASET UNSTRUCTURED_GRID\n";

    const bool quadratic = space.degree == 2;
    const int npoints = quadratic ? space.n_dofs : mesh.num_vertices();
    out << "POINTS " << npoints << " double\n";
    for (int i = 0; i < npoints; ++i) {
        const Vec2& p = quadratic ? space.dof_node[i] : mesh.vertices[i];
        out << p.x() << " " << p.y() << " 0\n";
    }

    const int nt = mesh.num_triangles();
    const int per_cell = quadratic ? 6 : 3;
    out << "CELLS " << nt << " " << nt * (per_cell + 1) << "\n";
    for (int t = 0; t < nt; ++t) {
        out << per_cell;
        if (quadratic)
            for (const int dof : space.dofs(t)) out << " " << dof;
        else
            for (const int v : mesh.triangles[t]) out << " " << v;
        out << "\n";
    }
    out << "CELL_TYPES " << nt << "\n";
    for (int t = 0; t < nt; ++t) out << (quadratic ? 22 : 5) << "\n";

    out << "POINT_DATA " << npoints << "\n"
        << "SCALARS deflection double 1\n"
        << "LOOKUP_TABLE default\n";
    for (int i = 0; i < npoints; ++i) out << coeffs[i] << "\n";
    if (!out) throw IoError("write failed for '" + path + "'");
}

// Solution values at the DOF nodes as x,y,deflection rows.
inline void export_solution_csv(const FESpace& space, const FieldCoefficients& coeffs,
                                const std::string& path) {
    auto out = detail::open_out(path);
    out << "x,y,deflection\n";
    for (int i = 0; i < space.n_dofs; ++i)
        out << space.dof_node[i].x() << "," << space.dof_node[i].y() << "," << coeffs[i]
            << "\n";
    if (!out) throw IoError("write failed for '" + path + "'");
}

inline void export_table_csv(const RateTable& table, const std::string& path) {
    auto out = detail::open_out(path);
    out << std::setprecision(17);  // round-trip faithful
    for (std::size_t c = 0; c < table.columns.size(); ++c)
        out << table.columns[c] << (c + 1 < table.columns.size() ? "," : "");
    out << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (!std::isnan(row[c])) out << row[c];
            out << (c + 1 < row.size() ? "," : "");
        }
        out << "\n";
    }
    if (!out) throw IoError("write failed for '" + path + "'");
}

inline RateTable parse_table_csv(const std::string& text) {
    RateTable table;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw IoError("csv parse: empty input");
    std::istringstream header(line);
    std::string cell;
    while (std::getline(header, cell, ',')) table.columns.push_back(cell);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ','))
            row.push_back(cell.empty() ? std::numeric_limits<double>::quiet_NaN()
                                       : std::stod(cell));
        while (row.size() < table.columns.size())
            row.push_back(std::numeric_limits<double>::quiet_NaN());
        table.rows.push_back(std::move(row));
    }
    return table;
}

// Key/value run report.
inline void write_report(const SolveReport& report, const EnergyNorms& norms,
                         const std::vector<std::string>& extra, const std::string& path) {
    auto out = detail::open_out(path);
    out << "solver = " << report.solver << "\n"
        << "iterations = " << report.iterations << "\n"
        << "rel_residual = " << report.rel_residual << "\n"
        << "max_asymmetry = " << report.max_asymmetry << "\n"
        << "wall_seconds = " << report.wall_seconds << "\n";
    if (!std::isnan(report.min_rayleigh)) out << "min_rayleigh = " << report.min_rayleigh << "\n";
    out << "plate_energy_norm = " << norms.plate << "\n";
    for (std::size_t b = 0; b < norms.beams.size(); ++b)
        out << "beam" << b << "_energy_norm = " << norms.beams[b] << "\n";
    for (const std::string& line : extra) out << line << "\n";
    if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace cutplate
