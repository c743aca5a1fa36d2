// recon: watertight surface reconstruction from an oriented point cloud.
//
// The input is a set of points with outward orientation hints (normals or
// view directions). A vector field is splatted onto a uniform grid, smoothed,
// and its divergence drives a convex energy whose minimizer is a soft
// inside/outside indicator; thresholding, re-smoothing, and marching cubes
// turn that into a closed triangle mesh.

#include <cstdio>
#include <exception>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "recon/pipeline.hpp"
#include "recon/synthetic.hpp"

namespace {

bool parse_vec3(const std::string& text, recon::Vec3& out) {
    std::string s = text;
    for (char& c : s)
        if (c == ',') c = ' ';
    std::istringstream ss(s);
    double x, y, z;
    if (!(ss >> x >> y >> z)) return false;
    std::string rest;
    if (ss >> rest) return false;
    out = {x, y, z};
    return true;
}

std::string human_bytes(std::size_t bytes) {
    char buf[32];
    if (bytes >= (std::size_t{1} << 30))
        std::snprintf(buf, sizeof(buf), "%.1f GiB", double(bytes) / double(std::size_t{1} << 30));
    else if (bytes >= (std::size_t{1} << 20))
        std::snprintf(buf, sizeof(buf), "%.1f MiB", double(bytes) / double(std::size_t{1} << 20));
    else
        std::snprintf(buf, sizeof(buf), "%.1f KiB", double(bytes) / double(std::size_t{1} << 10));
    return buf;
}

void print_summary(const recon::RunSummary& s) {
    const auto& d = s.frame.dims;
    std::printf("grid: %d x %d x %d (spacing %.6g)\n", d.nx, d.ny, d.nz, s.frame.h);
    std::printf("iterations per level:");
    for (int it : s.iterations_per_level) std::printf(" %d", it);
    std::printf("\nfinal energy: %.10g (%s)\n", s.final_energy,
                s.converged ? "converged" : "budget exhausted");
    std::printf("isovalue: %.10g\n", s.isovalue);
    std::printf("mesh: %zu triangles, %zu vertices\n", s.triangle_count, s.vertex_count);
    std::printf("peak memory (grids): %s\n", human_bytes(s.peak_memory_bytes).c_str());
    std::printf("wall time: %.3f s\n", s.wall_seconds);
    for (const std::string& w : s.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
}

int run_gen_sphere(const recon::SyntheticCloudSpec& spec, const std::string& output) {
    std::vector<recon::PointSample> samples = recon::generate_cloud(spec);
    recon::write_cloud_text(samples, output);
    std::printf("wrote %zu samples to %s\n", samples.size(), output.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Surface reconstruction from oriented points: splat the orientations\n"
        "onto a grid, minimize a convex flux-vs-smoothness energy for a soft\n"
        "inside/outside indicator, and contour it into a watertight mesh."};
    app.set_config("--config", "", "Read options from a 'key = value' file; command-line flags win");

    std::string input, output, mode_name = "tv", viewdir_text, viewdir_file;
    std::string log_path, report_path;
    recon::RunConfig cfg;

    app.add_option("--input", input, "Point cloud: .ply (ascii or binary little-endian) or text "
                                     "with 'x y z' or 'x y z nx ny nz' per line");
    app.add_option("--output", output, "Mesh to write: .obj or .ply (binary)");
    app.add_option("--grid", cfg.target_max_dim,
                   "Vertices along the longest padded axis (cells are cubes)")
        ->capture_default_str();
    app.add_option("--lambda", cfg.solver.lambda,
                   "Smoothness weight; the flux term is density-normalized, so the same "
                   "value behaves alike across grid resolutions")
        ->capture_default_str();
    app.add_option("--mode", mode_name, "Energy: 'tv' (total variation) or 'poisson' (quadratic)")
        ->check(CLI::IsMember({"tv", "poisson"}))
        ->capture_default_str();
    app.add_option("--mu", cfg.mu, "Threshold level in (0,1) for re-binarization")
        ->capture_default_str();
    app.add_option("--levels", cfg.solver.levels, "Multi-resolution levels (1 = single grid)")
        ->capture_default_str();
    app.add_option("--max-iters", cfg.solver.max_iters, "Sweep budget per level")
        ->capture_default_str();
    app.add_option("--tol", cfg.solver.rel_energy_tol,
                   "Stop when the relative energy change between checks falls below this")
        ->capture_default_str();
    app.add_option("--omega", cfg.solver.omega, "Over-relaxation factor in (0,2)")
        ->capture_default_str();
    app.add_option("--epsilon", cfg.solver.epsilon, "Diffusivity guard for the TV mode")
        ->capture_default_str();
    app.add_option("--pad", cfg.padding_fraction,
                   "Bounding-box padding per side as a fraction of each axis extent")
        ->capture_default_str();
    auto* vd = app.add_option("--viewdir", viewdir_text,
                              "Single view direction 'X,Y,Z' used when the file has no normals");
    auto* vdf = app.add_option("--viewdir-file", viewdir_file,
                               "File with one 'x y z' view direction per input point");
    vd->excludes(vdf);
    vdf->excludes(vd);
    app.add_option("--log", log_path, "Write a CSV energy trace: iteration,energy");
    app.add_option("--report", report_path,
                   "Write a TSV of inside-vertex counts at thresholds 0.1/0.25/0.5/0.75/0.9");
    app.add_option("--threads", cfg.threads, "Worker threads (0 = all hardware threads)")
        ->capture_default_str();
    app.add_option("--seed", cfg.seed,
                   "Accepted for interface symmetry; reconstruction is deterministic")
        ->capture_default_str();
    app.add_flag("--no-rebinarize", cfg.no_rebinarize,
                 "Debug: contour the relaxed indicator at --mu instead of re-binarizing");

    auto* gen = app.add_subcommand("gen-sphere", "Generate a synthetic sphere cloud (text output)");
    recon::SyntheticCloudSpec sphere;
    std::string gen_output;
    double hole_cap_deg = 0.0;
    gen->add_option("--count", sphere.count, "Candidate draws (rejections thin the output)")
        ->required();
    gen->add_option("--radius", sphere.radius, "Sphere radius")->capture_default_str();
    gen->add_option("--hole-cap-deg", hole_cap_deg,
                    "Remove a polar cap of this angular radius (degrees) around +z")
        ->capture_default_str();
    gen->add_option("--density-skew", sphere.density_skew,
                    "Keep all samples with x >= 0 but only 1/skew of those with x < 0")
        ->capture_default_str();
    gen->add_option("--noise", sphere.noise_sigma, "Radial Gaussian noise sigma (world units)")
        ->capture_default_str();
    gen->add_option("--normal-error-deg", sphere.orientation_error_deg,
                    "Tilt every normal by exactly this angle (random azimuth)")
        ->capture_default_str();
    gen->add_option("--seed", sphere.seed, "Generator seed")->required();
    gen->add_option("--output", gen_output, "Output text file (x y z nx ny nz)")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return run_gen_sphere(sphere, gen_output);

        if (input.empty() || output.empty()) {
            std::fprintf(stderr, "error: --input and --output are required (see --help)\n");
            return 1;
        }
        cfg.input = input;
        cfg.output = output;
        cfg.energy_log_path = log_path;
        cfg.threshold_report_path = report_path;
        cfg.solver.mode = (mode_name == "poisson") ? recon::SolveMode::Poisson : recon::SolveMode::TV;
        if (!viewdir_text.empty()) {
            cfg.orientation.kind = recon::OrientationSource::Kind::ViewDir;
            if (!parse_vec3(viewdir_text, cfg.orientation.viewdir)) {
                std::fprintf(stderr, "error: --viewdir expects 'X,Y,Z', got '%s'\n",
                             viewdir_text.c_str());
                return 1;
            }
        } else if (!viewdir_file.empty()) {
            cfg.orientation.kind = recon::OrientationSource::Kind::ViewDirFile;
            cfg.orientation.viewdir_file = viewdir_file;
        }

        print_summary(recon::run_pipeline(cfg));
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
