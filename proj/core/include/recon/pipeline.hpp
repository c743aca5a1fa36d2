#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "recon/cloud_io.hpp"
#include "recon/field.hpp"
#include "recon/grid.hpp"
#include "recon/solver.hpp"
#include "recon/surface.hpp"

namespace recon {

/// Everything a full reconstruction run needs. Solver settings keep their
/// own defaults; lambda is the weight of the smoothness term relative to the
/// (density-normalized) flux data term and is resolution-independent.
struct RunConfig {
    std::string input;   // cloud path (.ply or text); unused by the overload taking samples
    std::string output;  // mesh path (.obj or .ply); empty = don't write
    OrientationSource orientation;
    SolverConfig solver;
    int target_max_dim = 256;        // vertices along the longest padded axis
    double padding_fraction = 0.05;  // bounding-box padding per side, per axis
    double mu = 0.5;                 // threshold level for re-binarization
    bool no_rebinarize = false;      // debug: contour the relaxed field at mu directly
    std::string energy_log_path;       // CSV "iteration,energy"; empty = off
    std::string threshold_report_path; // TSV "mu\tinside_count"; empty = off
    int threads = 0;                 // 0 = all hardware threads
    unsigned long long seed = 0;     // reserved; reconstruction itself is deterministic
};

struct RunSummary {
    GridFrame frame;  // solve grid (after pyramid padding)
    std::size_t samples_used = 0;
    std::size_t samples_rejected = 0;
    std::vector<int> iterations_per_level;
    double final_energy = 0.0;
    bool converged = true;
    double isovalue = 0.0;
    std::size_t vertex_count = 0;
    std::size_t triangle_count = 0;
    std::size_t peak_memory_bytes = 0;  // estimate: largest sum of live grid buffers
    double wall_seconds = 0.0;
    std::vector<std::string> warnings;
};

/// Full run: read cloud, build grid, splat + smooth + divergence, multi-level
/// solve, re-binarize, extract and write the mesh. Errors carry the failing
/// stage's name. Non-convergence is a warning, not an error.
RunSummary run_pipeline(const RunConfig& cfg);

/// Same, starting from in-memory samples (cfg.input is ignored). If mesh_out
/// is non-null the extracted mesh is copied there; if cfg.output is empty the
/// write stage is skipped.
RunSummary run_pipeline(const RunConfig& cfg, std::vector<PointSample> samples,
                        TriangleMesh* mesh_out = nullptr);

}  // namespace recon
