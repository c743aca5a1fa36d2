#pragma once

#include <utility>
#include <vector>

#include "recon/grid.hpp"

namespace recon {

/// Smoothness penalty: TV uses phi(s) = s (total variation), Poisson uses
/// phi(s) = s^2, whose Euler-Lagrange equation is the linear 2*lambda*lap(u) =
/// -div system.
enum class SolveMode { TV, Poisson };

/// DirichletZero pins the outermost vertex layer to u = 0 (the model is
/// strictly inside the volume). Free updates every vertex with its in-grid
/// neighbors only; used by the tiny-grid oracle comparisons and the
/// complement-symmetry checks.
enum class Boundary { DirichletZero, Free };

struct SolverConfig {
    double lambda = 0.007;
    double omega = 1.85;          // SOR relaxation, must be in (0,2)
    double epsilon = 0.001;       // diffusivity guard
    SolveMode mode = SolveMode::TV;
    Boundary boundary = Boundary::DirichletZero;
    int g_update_stride = 2;      // sweeps between diffusivity refreshes
    int max_iters = 2000;         // sweep budget per level
    double rel_energy_tol = 1e-6;
    int levels = 3;
};

struct SolveReport {
    std::vector<int> iterations_per_level;
    /// (sweep number, energy) pairs; sweep numbers are cumulative across
    /// levels in multi-resolution solves. Recorded every g-update in TV mode
    /// and every sweep in Poisson mode.
    std::vector<std::pair<int, double>> energy_trace;
    double final_energy = 0.0;
    bool converged = false;
};

/// The discrete objective lambda*sum(phi(|grad u|)) - sum(div*u) on the
/// unit-spacing lattice. |grad u| uses forward differences (zero past the last
/// vertex per axis), the same stencil as update_diffusivity. `div` must be in
/// the solver's lattice units (see pipeline notes); no epsilon enters here.
double energy(const ScalarGrid& u, const ScalarGrid& div, double lambda, SolveMode mode);

/// Lagged diffusivity g = 1/sqrt(|grad u|^2 + epsilon^2), forward differences.
ScalarGrid update_diffusivity(const ScalarGrid& u, double epsilon);

/// One canonical lexicographic Gauss-Seidel pass with over-relaxation:
///   u_i <- (1-w)*u_i + w*(c*sum_j g_ij*u_j + div_i) / (c*sum_j g_ij),
/// g_ij = (g_i+g_j)/2 over the 6-neighborhood, c = lambda (TV) or 2*lambda
/// (Poisson, where g is identically 1), followed by a clamp to [0,1].
/// Already-visited neighbors contribute their updated values. Boundary
/// vertices are held at 0 under DirichletZero.
void sor_sweep(ScalarGrid& u, const ScalarGrid& g, const ScalarGrid& div,
               const SolverConfig& cfg);

/// Runs sweeps from u0 until the relative energy change between successive
/// checks drops below cfg.rel_energy_tol or max_iters is hit. TV mode
/// refreshes g every g_update_stride sweeps and checks energy at the same
/// cadence; Poisson mode checks every sweep. Quiet regions are skipped via an
/// 8^3 active-block bitmap (blocks with no divergence and no recent change),
/// with a guard full sweep every 16.
std::pair<ScalarGrid, SolveReport> solve_level(const ScalarGrid& div, const ScalarGrid& u0,
                                               const SolverConfig& cfg);

/// Coarse-to-fine driver: div is down-sampled by summation to every level,
/// the coarsest level starts from u = 0, and each finer level starts from the
/// up-sampled coarser solution. With a single-level pyramid this is exactly
/// solve_level from zero.
std::pair<ScalarGrid, SolveReport> solve_multires(const ScalarGrid& div_fine,
                                                  const Pyramid& pyramid,
                                                  const SolverConfig& cfg);

/// Sums each fine vertex's value into its nearest coarse vertex (ties toward
/// the lexicographically lower vertex); preserves the total exactly.
ScalarGrid downsample_sum(const ScalarGrid& fine, const GridFrame& coarse);

/// Injection at coincident vertices, trilinear interpolation for the rest.
ScalarGrid upsample(const ScalarGrid& coarse, const GridFrame& fine);

/// max over interior vertices with u strictly inside (0,1) of
/// |2*lambda*lap(u) + div|, the defining residual of the Poisson mode.
double poisson_residual_inf(const ScalarGrid& u, const ScalarGrid& div, double lambda);

}  // namespace recon
