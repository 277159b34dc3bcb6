#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <chrono>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "cutplate/geometry.hpp"

namespace cutplate {

using SparseMat = Eigen::SparseMatrix<double>;

struct Constraint {
    int dof = -1;
    double value = 0.0;
};

// Sparse symmetric operator with load vector and strong constraints.
struct LinearSystem {
    SparseMat matrix;
    Eigen::VectorXd load;
    std::vector<Constraint> constraints;

    int size() const { return static_cast<int>(matrix.rows()); }
};

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SingularSystemError : SolverError {
    int pivot;
    explicit SingularSystemError(int pivot_index)
        : SolverError("singular or indefinite system: offending pivot at reduced index " +
                      std::to_string(pivot_index)),
          pivot(pivot_index) {}
};

// A_h(v,w) = a_plate(v,w) + sum_beams a_beam(v,w); loads add the same way.
inline LinearSystem superpose(const LinearSystem& plate, std::span<const SparseMat> beam_matrices,
                              std::span<const Eigen::VectorXd> beam_loads) {
    LinearSystem system = plate;
    for (const SparseMat& m : beam_matrices) {
        if (m.rows() != system.matrix.rows() || m.cols() != system.matrix.cols())
            throw SolverError("superpose: beam matrix dimension mismatch");
        system.matrix += m;
    }
    for (const Eigen::VectorXd& l : beam_loads) {
        if (l.size() != system.load.size())
            throw SolverError("superpose: beam load dimension mismatch");
        system.load += l;
    }
    return system;
}

enum class SolverKind { direct, cg };

struct SolveOptions {
    SolverKind method = SolverKind::direct;
    double tol = 1e-10;
    int max_iterations = 20000;
};

struct SolveReport {
    std::string solver;
    int iterations = 0;
    double rel_residual = 0.0;
    double max_asymmetry = 0.0;
    double min_rayleigh = std::numeric_limits<double>::quiet_NaN();  // set by diagnostics
    double wall_seconds = 0.0;
};

namespace detail {

inline double max_asymmetry(const SparseMat& a) {
    SparseMat diff = SparseMat(a.transpose()) - a;
    double m = 0.0;
    for (int k = 0; k < diff.outerSize(); ++k)
        for (SparseMat::InnerIterator it(diff, k); it; ++it)
            m = std::max(m, std::abs(it.value()));
    return m;
}

inline double max_abs_entry(const SparseMat& a) {
    double m = 0.0;
    for (int k = 0; k < a.outerSize(); ++k)
        for (SparseMat::InnerIterator it(a, k); it; ++it) m = std::max(m, std::abs(it.value()));
    return m;
}

struct ReducedSystem {
    SparseMat matrix;
    Eigen::VectorXd rhs;
    std::vector<int> free_dofs;              // reduced index -> full index
    Eigen::VectorXd prescribed;              // full-size, constrained values filled
    std::vector<signed char> is_constrained; // full-size mask
};

// Symmetric elimination: keep free rows/columns, move known values to the rhs.
inline ReducedSystem reduce(const LinearSystem& system) {
    const int n = system.size();
    ReducedSystem red;
    red.is_constrained.assign(n, 0);
    red.prescribed = Eigen::VectorXd::Zero(n);
    for (const Constraint& c : system.constraints) {
        if (c.dof < 0 || c.dof >= n) throw SolverError("constraint index out of range");
        red.is_constrained[c.dof] = 1;
        red.prescribed[c.dof] = c.value;
    }
    std::vector<int> full_to_reduced(n, -1);
    for (int i = 0; i < n; ++i)
        if (!red.is_constrained[i]) {
            full_to_reduced[i] = static_cast<int>(red.free_dofs.size());
            red.free_dofs.push_back(i);
        }
    const int m = static_cast<int>(red.free_dofs.size());

    Eigen::VectorXd rhs(m);
    for (int i = 0; i < m; ++i) rhs[i] = system.load[red.free_dofs[i]];

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(system.matrix.nonZeros());
    for (int k = 0; k < system.matrix.outerSize(); ++k)
        for (SparseMat::InnerIterator it(system.matrix, k); it; ++it) {
            const int r = full_to_reduced[static_cast<int>(it.row())];
            const int c = full_to_reduced[static_cast<int>(it.col())];
            if (r >= 0 && c >= 0)
                triplets.emplace_back(r, c, it.value());
            else if (r >= 0 && c < 0)
                rhs[r] -= it.value() * red.prescribed[static_cast<int>(it.col())];
        }
    red.matrix.resize(m, m);
    red.matrix.setFromTriplets(triplets.begin(), triplets.end());
    red.rhs = std::move(rhs);
    return red;
}

}  // namespace detail

// Solves the constrained system. Constrained DOFs carry their prescribed
// values exactly in the returned vector. Throws SingularSystemError when the
// factorization hits a (near-)zero pivot, SolverError on CG breakdown.
inline std::pair<Eigen::VectorXd, SolveReport> solve(const LinearSystem& system,
                                                     const SolveOptions& options = {}) {
    const auto t0 = std::chrono::steady_clock::now();
    SolveReport report;
    report.max_asymmetry = detail::max_asymmetry(system.matrix);

    auto red = detail::reduce(system);
    Eigen::VectorXd x_free;

    if (options.method == SolverKind::direct) {
        report.solver = "direct";
        Eigen::SimplicialLDLT<SparseMat> ldlt(red.matrix);
        if (ldlt.info() != Eigen::Success) throw SingularSystemError(-1);
        const Eigen::VectorXd d = ldlt.vectorD();
        const double dmax = d.cwiseAbs().maxCoeff();
        for (int i = 0; i < d.size(); ++i)
            if (!(std::abs(d[i]) > 1e-14 * dmax)) throw SingularSystemError(i);
        x_free = ldlt.solve(red.rhs);
        // iterative refinement: the plate operator scales like h^-4, one
        // backward-stable pass is not enough for the default tolerance
        const double rhs_scale = red.rhs.norm();
        for (int step = 0; step < 5 && rhs_scale > 0.0; ++step) {
            const Eigen::VectorXd residual = red.rhs - red.matrix * x_free;
            if (residual.norm() <= options.tol * rhs_scale) break;
            x_free += ldlt.solve(residual);
        }
    } else {
        report.solver = "cg";
        Eigen::ConjugateGradient<SparseMat, Eigen::Lower | Eigen::Upper,
                                 Eigen::DiagonalPreconditioner<double>>
            cg(red.matrix);
        cg.setTolerance(options.tol);
        cg.setMaxIterations(options.max_iterations);
        x_free = cg.solve(red.rhs);
        report.iterations = static_cast<int>(cg.iterations());
        if (cg.info() != Eigen::Success)
            throw SolverError("cg did not converge after " +
                              std::to_string(options.max_iterations) +
                              " iterations (error " + std::to_string(cg.error()) + ")");
    }

    const double rhs_norm = red.rhs.norm();
    const double res = (red.matrix * x_free - red.rhs).norm();
    report.rel_residual = rhs_norm > 0.0 ? res / rhs_norm : res;
    if (!x_free.allFinite()) throw SingularSystemError(-1);
    if (options.method == SolverKind::direct && rhs_norm > 0.0) {
        // the measured residual cannot drop below eps (|A| |x| + |b|); for
        // penalty-dominated operators that floor sits above the tolerance
        const double floor = std::numeric_limits<double>::epsilon() *
                             (detail::max_abs_entry(red.matrix) * x_free.lpNorm<1>() +
                              rhs_norm) /
                             rhs_norm;
        if (report.rel_residual > std::max(options.tol, 32.0 * floor)) {
            std::ostringstream msg;
            msg << "direct solve residual " << report.rel_residual
                << " exceeds tolerance " << options.tol;
            throw SolverError(msg.str());
        }
    }

    Eigen::VectorXd x = red.prescribed;
    for (std::size_t i = 0; i < red.free_dofs.size(); ++i) x[red.free_dofs[i]] = x_free[i];

    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {x, report};
}

// Minimum Rayleigh quotient A(v,v) / (v' G v) over seeded random vectors that
// vanish on the constrained DOFs. G is the Gram matrix of the energy norm(s).
inline double positivity_diagnostic(const LinearSystem& system, const SparseMat& energy_gram,
                                    int samples, std::uint32_t seed = 0) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<signed char> constrained(system.size(), 0);
    for (const Constraint& c : system.constraints) constrained[c.dof] = 1;

    double min_quotient = std::numeric_limits<double>::infinity();
    for (int s = 0; s < samples; ++s) {
        Eigen::VectorXd v(system.size());
        for (int i = 0; i < system.size(); ++i) v[i] = constrained[i] ? 0.0 : dist(rng);
        const double energy = v.dot(system.matrix * v);
        const double norm2 = v.dot(energy_gram * v);
        if (norm2 <= 0.0) continue;
        min_quotient = std::min(min_quotient, energy / norm2);
    }
    return min_quotient;
}

}  // namespace cutplate
