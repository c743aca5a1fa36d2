#include "recon/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <utility>

#include "recon/parallel.hpp"

namespace recon {
namespace {

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("stage '") + name + "': " + e.what());
    }
}

std::size_t grid_bytes(const GridFrame& f) { return f.dims.vertex_count() * sizeof(double); }

void track_peak(std::size_t& peak, std::size_t live) {
    if (live > peak) peak = live;
}

void write_energy_log(const std::string& path, const SolveReport& report) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error(path + ": cannot open for writing");
    os << "iteration,energy\n";
    char line[64];
    for (const auto& [iter, e] : report.energy_trace) {
        std::snprintf(line, sizeof(line), "%d,%.17g\n", iter, e);
        os << line;
    }
    if (!os) throw std::runtime_error(path + ": write failed");
}

void write_threshold_report(const std::string& path, const ScalarGrid& u) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error(path + ": cannot open for writing");
    os << "mu\tinside_count\n";
    for (double mu : {0.1, 0.25, 0.5, 0.75, 0.9}) {
        char line[64];
        std::snprintf(line, sizeof(line), "%g\t%zu\n", mu, threshold(u, mu).inside_count);
        os << line;
    }
    if (!os) throw std::runtime_error(path + ": write failed");
}

}  // namespace

RunSummary run_pipeline(const RunConfig& cfg, std::vector<PointSample> samples,
                        TriangleMesh* mesh_out) {
    const auto t0 = std::chrono::steady_clock::now();
    set_thread_count(cfg.threads);

    RunSummary summary;
    summary.samples_used = samples.size();
    if (samples.empty())
        throw std::runtime_error("stage 'grid': no input samples");

    // ---- grid placement ---------------------------------------------------
    Pyramid pyramid = stage("grid", [&] {
        std::vector<Vec3> positions;
        positions.reserve(samples.size());
        for (const PointSample& s : samples) positions.push_back(s.p);
        GridFrame base = build_frame(positions, cfg.target_max_dim, cfg.padding_fraction);
        return build_pyramid(base, cfg.solver.levels);
    });
    const GridFrame frame = pyramid.finest();
    summary.frame = frame;
    const double h = frame.h;
    std::size_t peak = samples.size() * sizeof(PointSample);

    // ---- flux data term ---------------------------------------------------
    // splat accumulates raw trilinear weights; dividing the divergence by h^3
    // afterwards turns the sum into a per-volume density, which keeps lambda's
    // meaning independent of grid resolution (on unit-spacing grids this is
    // the identity).
    ScalarGrid div = stage("divergence", [&] {
        VectorGrid raw = splat(samples, frame);
        track_peak(peak, samples.size() * sizeof(PointSample) + 3 * grid_bytes(frame));
        VectorGrid smooth = box_smooth(raw, 3);
        track_peak(peak, samples.size() * sizeof(PointSample) + 6 * grid_bytes(frame));
        for (auto& c : raw.comp) {
            c.clear();
            c.shrink_to_fit();
        }
        ScalarGrid d = divergence(smooth);
        track_peak(peak, 4 * grid_bytes(frame));
        // divergence() already divides by the world spacing once (1/2h); the
        // remaining h^2 completes the 1/h^3 density normalization while the
        // solver itself works on the unit-spacing lattice.
        const double scale = 1.0 / (h * h);
        for (double& x : d.data) x *= scale;
        return d;
    });

    // ---- multi-resolution solve --------------------------------------------
    auto [u, report] = stage("solve", [&] { return solve_multires(div, pyramid, cfg.solver); });
    track_peak(peak, 4 * grid_bytes(frame));  // div + u + g + change bookkeeping
    summary.iterations_per_level = report.iterations_per_level;
    summary.final_energy = report.final_energy;
    summary.converged = report.converged;
    if (!report.converged)
        summary.warnings.push_back("solver hit the sweep budget before the energy settled");

    if (!cfg.energy_log_path.empty())
        stage("energy-log", [&] { write_energy_log(cfg.energy_log_path, report); return 0; });
    if (!cfg.threshold_report_path.empty())
        stage("threshold-report",
              [&] { write_threshold_report(cfg.threshold_report_path, u); return 0; });

    div.data.clear();
    div.data.shrink_to_fit();

    // ---- re-binarize and extract -------------------------------------------
    ScalarGrid u_tilde = stage("binarize", [&] {
        if (cfg.no_rebinarize) {
            summary.isovalue = cfg.mu;
            return u;
        }
        ScalarGrid u_hat = threshold(u, cfg.mu).binary;
        track_peak(peak, 2 * grid_bytes(frame));
        ScalarGrid smooth = smooth_binary(u_hat);
        track_peak(peak, 3 * grid_bytes(frame));
        summary.isovalue = select_isovalue(smooth, samples);
        return smooth;
    });
    u.data.clear();
    u.data.shrink_to_fit();

    TriangleMesh mesh = stage("contour", [&] { return marching_cubes(u_tilde, summary.isovalue); });
    track_peak(peak, grid_bytes(frame) + mesh.vertices.size() * sizeof(Vec3)
                         + mesh.triangles.size() * sizeof(std::array<std::uint32_t, 3>));
    summary.vertex_count = mesh.vertices.size();
    summary.triangle_count = mesh.triangles.size();
    if (mesh.triangles.empty())
        summary.warnings.push_back("extracted mesh is empty (isovalue misses the field range)");

    if (!cfg.output.empty())
        stage("write", [&] { write_mesh(mesh, cfg.output); return 0; });
    if (mesh_out) *mesh_out = std::move(mesh);

    summary.peak_memory_bytes = peak;
    summary.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return summary;
}

RunSummary run_pipeline(const RunConfig& cfg) {
    CloudReadResult cloud = stage("read", [&] { return read_cloud(cfg.input, cfg.orientation); });
    RunSummary summary = run_pipeline(cfg, std::move(cloud.samples), nullptr);
    summary.samples_rejected = cloud.rejected;
    if (cloud.rejected > 0)
        summary.warnings.push_back(std::to_string(cloud.rejected)
                                   + " point(s) dropped for zero-length orientation");
    return summary;
}

}  // namespace recon
